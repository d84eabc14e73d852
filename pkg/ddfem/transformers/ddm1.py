"""The DDM1 transformation: phase field weighted fluxes and sources,
surface delta flux terms and an outside penalty for Dirichlet data."""

from ddfem.arrays import as_flux, as_state
from ddfem.transformers.pretransformer import zero_if_none
from ddfem.transformers.registry import transformer

DEFAULT_PENALTY_EXPONENT = 3.0


@transformer(name="ddm1")
def ddm1_transform(model, original, domain, bt, penalty_exponent: float = DEFAULT_PENALTY_EXPONENT):
    """
    Args:
        model: Pretransformed model with extended coefficients.
        original: Model before the transformation.
        domain: Phase field domain.
        bt: Boundary terms.
        penalty_exponent: Power p of epsilon in the penalty (1 - phi)/eps^p.
    """
    eps_power = domain.epsilon ** float(penalty_exponent)
    phi = domain.phi
    m = model.dim_range

    def S_e_source(t, x, U, DU):
        return phi(x)[:, None] * as_state(model.S_e(t, x, U, DU), len(x), m)

    def S_e_convection(t, x, U, DU):
        return -zero_if_none(bt.bnd_flux_c_ext(t, x, U), U)

    def S_outside(t, x, U, DU):
        jump = bt.jump_v(t, x, U)
        if jump is None:
            return None
        return -jump * ((1.0 - phi(x)) / eps_power)[:, None]

    def S_i_source(t, x, U, DU):
        return phi(x)[:, None] * as_state(model.S_i(t, x, U, DU), len(x), m)

    def S_i_diffusion(t, x, U, DU):
        return zero_if_none(bt.bnd_flux_v_ext(t, x, U, DU), U)

    def F_c(t, x, U):
        return phi(x)[:, None, None] * as_flux(model.F_c(t, x, U), len(x), m, x.shape[-1])

    def F_v(t, x, U, DU):
        return phi(x)[:, None, None] * as_flux(model.F_v(t, x, U, DU), len(x), m, x.shape[-1])

    if original.mass is None:
        mass = phi
    else:
        def mass(x):
            return phi(x) * original.mass(domain.external_projection(x))

    return {
        "S_e_source": S_e_source,
        "S_e_convection": S_e_convection,
        "S_outside": S_outside,
        "S_i_source": S_i_source,
        "S_i_diffusion": S_i_diffusion,
        "F_c": F_c,
        "F_v": F_v,
        "mass": mass,
    }
