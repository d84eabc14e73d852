#!/usr/bin/env python3
"""
Run several scenes in parallel by launching one ddfem process per scene.

Each scene runs in its own process; parallelism across scenes comes from
running several processes, parallelism inside one scene from --threads.

Examples:
  # Solve every bundled scene, at most 3 at a time
  python scripts/run_scenes.py solve --scenes "scenes/*.json" --max-parallel 3

  # Scenes from a file (one path per line), render with 2 threads each
  python scripts/run_scenes.py render --scenes-file scenes.txt --threads 2

Notes:
  - Options not given here are inherited from DDFEM_* env vars via main.py defaults.
  - Scenes write to <out>/<scene name>/<command>, so two runs of the same
    scene and command should not be started together.
"""

from __future__ import annotations

import argparse
import asyncio
import glob
import sys
import time
from pathlib import Path
from typing import List, Optional

MAIN = Path(__file__).resolve().parents[1] / "main.py"


def _parse_scenes(scenes: Optional[str], scenes_file: Optional[str]) -> List[str]:
    if scenes and scenes_file:
        raise ValueError("Provide only one of --scenes or --scenes-file")
    if scenes:
        found: List[str] = []
        for pattern in scenes.split(","):
            pattern = pattern.strip()
            if pattern:
                found.extend(sorted(glob.glob(pattern)) or [pattern])
        return found
    if scenes_file:
        lines = Path(scenes_file).read_text(encoding="utf-8").splitlines()
        return [ln.strip() for ln in lines if ln.strip() and not ln.strip().startswith("#")]
    raise ValueError("You must provide --scenes or --scenes-file")


async def _pipe_lines(stream: asyncio.StreamReader, prefix: str, is_stderr: bool = False) -> None:
    """Stream subprocess output line by line with a scene prefix."""
    if stream is None:
        return
    while True:
        line = await stream.readline()
        if not line:
            break
        text = line.decode("utf-8", errors="replace").rstrip("\n")
        tag = "ERR" if is_stderr else "OUT"
        print(f"[{prefix}][{tag}] {text}", flush=True)


async def _run_one(command: str, scene: str, sem: asyncio.Semaphore, extra_args: List[str]) -> int:
    async with sem:
        # -u: unbuffered output so concurrent runs interleave in real time
        cmd = [sys.executable, "-u", str(MAIN), command, "--scene", scene, *extra_args]
        label = Path(scene).stem
        started = time.time()
        print(f"[{label}][SYS] starting: {' '.join(cmd)}", flush=True)
        proc = await asyncio.create_subprocess_exec(
            *cmd,
            stdout=asyncio.subprocess.PIPE,
            stderr=asyncio.subprocess.PIPE,
        )
        await asyncio.gather(
            _pipe_lines(proc.stdout, label, is_stderr=False),
            _pipe_lines(proc.stderr, label, is_stderr=True),
        )
        code = await proc.wait()
        print(f"[{label}][SYS] exit={code} duration={time.time() - started:.1f}s", flush=True)
        return int(code)


async def _amain(args: argparse.Namespace) -> int:
    scenes = _parse_scenes(args.scenes, args.scenes_file)
    if len(set(scenes)) != len(scenes):
        raise ValueError("Duplicate scenes detected; each scene should appear only once.")

    extra_args: List[str] = []
    if args.out:
        extra_args += ["--out", args.out]
    if args.threads is not None:
        extra_args += ["--threads", str(args.threads)]
    if args.transformer:
        extra_args += ["--transformer", args.transformer]
    if args.allow_coarse:
        extra_args += ["--allow-coarse"]
    if args.quiet:
        extra_args += ["--quiet"]
    if args.lang:
        extra_args += ["--lang", args.lang]

    sem = asyncio.Semaphore(max(1, int(args.max_parallel)))
    results = await asyncio.gather(
        *(_run_one(args.command, scene, sem, extra_args) for scene in scenes),
        return_exceptions=True,
    )
    exit_codes: List[int] = []
    for r in results:
        if isinstance(r, Exception):
            print(f"[ERROR] {r}", file=sys.stderr)
            exit_codes.append(1)
        else:
            exit_codes.append(int(r))
    # worst exit code wins, so numerical failures (3) are not masked by user errors (2)
    return max(exit_codes, default=0)


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Run several ddfem scenes in parallel (one process per scene)."
    )
    parser.add_argument("command", choices=["render", "solve", "convergence", "validate"])
    parser.add_argument("--scenes", type=str, default=None, help="Comma separated scene files or globs")
    parser.add_argument("--scenes-file", type=str, default=None, help="File with one scene path per line")
    parser.add_argument("--max-parallel", type=int, default=2, help="Max concurrent processes")

    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--transformer", type=str, default=None)
    parser.add_argument("--allow-coarse", action="store_true")
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--lang", choices=["cn", "en"], default=None)

    args = parser.parse_args()

    try:
        return asyncio.run(_amain(args))
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    raise SystemExit(main())
