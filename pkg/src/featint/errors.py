class FeatintError(ValueError):
    """Base class for every input/contract error raised by featint."""


class ParseError(FeatintError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class UnknownFeatureError(FeatintError):
    def __init__(self, name, context=""):
        self.name = name
        msg = f"unknown feature {name!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
