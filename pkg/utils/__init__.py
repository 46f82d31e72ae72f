# utils/__init__.py
__all__ = ["path_utils"]
