from sentifuse.core.dataframe.frame import Frame

__all__ = ["Frame"]
