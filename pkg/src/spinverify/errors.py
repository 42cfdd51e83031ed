"""Exception hierarchy shared by every module in the package."""


class ValidationError(ValueError):
    """Input failed a structural check (bad index, malformed file, ...)."""


class DimensionError(ValidationError):
    """Two objects that must agree in size do not."""


class CapExceededError(RuntimeError):
    """An exhaustive computation was refused because it is above its size cap.

    The CLI maps this to exit code 2.
    """

    def __init__(self, what: str, n: int, cap: int):
        self.what = what
        self.n = n
        self.cap = cap
        super().__init__(f"{what}: n={n} exceeds cap {cap} (2^{n} states); raise the cap explicitly to proceed")
