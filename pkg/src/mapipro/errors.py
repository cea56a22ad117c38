"""Exception hierarchy shared by every mapipro layer."""


class MapiproError(Exception):
    """Base class for all errors raised by mapipro."""


class ProfileError(MapiproError, ValueError):
    """A profile, device, power or table document failed validation.

    ``path`` is the dotted field path of the offending value (``""`` for the
    document root) and ``line`` the 1-based source line for syntax errors.
    """

    def __init__(self, message, path="", line=None):
        self.message = message
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class IllegalRegionError(MapiproError, ValueError):
    """An item was evaluated in or assigned to a region that cannot hold it."""


class PlacementError(MapiproError, ValueError):
    """A placement is not total, or violates exclusivity or a capacity bound."""


class BackupFitError(PlacementError):
    """SRAM occupancy plus the register file does not fit the backup region."""


class InfeasibleError(MapiproError):
    """No placement satisfies the capacity constraints."""


class UndefinedProgressError(MapiproError, ValueError):
    """Progress ratio requested for a run with zero execute cycles."""
