import enum


class GroupFamily(enum.Enum):
    CYCLIC = "cyclic"
    DIHEDRAL = "dihedral"
    SYMMETRIC = "symmetric"
    DIRECT_PRODUCT = "direct_product"


class MapKind(enum.Enum):
    CONVOLUTION = "convolution"
    PARITY = "parity"
    GENOTYPE = "genotype"


class ScheduleKind(enum.Enum):
    UNIT = "unit"
    GEOMETRIC = "geometric"
    EXPLICIT = "explicit"


class Condition(enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"


class DriftMethod(enum.Enum):
    ENUMERATION = "enumeration"
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte-carlo"
