"""Internationalization (i18n) tables for command line messages."""

# Chinese messages
MESSAGES_CN = {
    "loading_scene": "加载场景",
    "building_domain": "构建区域几何",
    "building_mesh": "构建网格",
    "filtering_mesh": "过滤网格单元",
    "transforming": "扩散区域变换",
    "assembling": "组装并求解",
    "time_stepping": "时间推进",
    "sampling": "采样场",
    "writing_output": "写出结果",
    "checks_passed": "所有检查通过！",
    "checks_failed": "检查失败，请修正上述问题。",
    "ok": "通过",
    "failed": "失败",
    "cells": "单元",
    "dofs": "自由度",
    "iterations": "迭代",
    "error": "错误",
    "epsilon": "界面宽度",
    "mass_drift": "质量漂移",
    "available_transformers": "可用的变换器",
    "available_problems": "可用的问题",
    "output_directory": "输出目录",
    "done": "完成",
}

# English messages
MESSAGES_EN = {
    "loading_scene": "Loading scene",
    "building_domain": "Building domain geometry",
    "building_mesh": "Building mesh",
    "filtering_mesh": "Filtering mesh cells",
    "transforming": "Applying diffuse domain transformation",
    "assembling": "Assembling and solving",
    "time_stepping": "Time stepping",
    "sampling": "Sampling field",
    "writing_output": "Writing output",
    "checks_passed": "All checks passed!",
    "checks_failed": "Checks failed. Please fix the issues above.",
    "ok": "OK",
    "failed": "FAILED",
    "cells": "cells",
    "dofs": "dofs",
    "iterations": "iterations",
    "error": "Error",
    "epsilon": "epsilon",
    "mass_drift": "mass drift",
    "available_transformers": "Available transformers",
    "available_problems": "Available problems",
    "output_directory": "Output directory",
    "done": "Done",
}


def get_messages(lang: str = "en") -> dict:
    """
    Get the message table of a language.

    Args:
        lang: 'cn' for Chinese, 'en' for English.

    Returns:
        Dictionary of UI messages.
    """
    if lang == "cn":
        return MESSAGES_CN
    return MESSAGES_EN


def get_message(key: str, lang: str = "en") -> str:
    """Get a single message, falling back to the key itself."""
    return get_messages(lang).get(key, key)
