"""异常层级: DataError 对应退出码 2, ConfigError 对应退出码 1"""


class CpdpError(Exception):
    """流水线所有异常的基类"""


class DataError(CpdpError, ValueError):
    """输入数据无法处理"""


class DatasetFormatError(DataError):
    pass


class DatasetParseError(DataError):
    def __init__(self, message: str, row: int = None, column: str = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDatasetError(DataError):
    pass


class DomainError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class DimensionMismatchError(DataError):
    pass


class DegenerateClusterError(DataError):
    pass


class SubsampleError(DataError):
    pass


class PairMismatchError(DataError):
    pass


class ConfigError(CpdpError, ValueError):
    """配置或命令行参数无效"""
