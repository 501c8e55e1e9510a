class UrnError(Exception):
    pass


# Invalid user input, the CLI exits with status 2
class InputError(UrnError, ValueError):
    pass


class ConfigError(InputError):
    pass


class GroupError(InputError):
    pass


class NotSquare(GroupError):
    pass


class NotLatinSquare(GroupError):
    pass


class NotAssociative(GroupError):
    pass


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    pass


class UnknownElement(GroupError):
    pass


class SizeCapExceeded(InputError):
    pass


class InvalidDistribution(InputError):
    pass


class NonBinaryStateSpace(InputError):
    pass


class InvalidFitness(InputError):
    pass


class NonIncreasingSchedule(InputError):
    pass


# A hypothesis of the convergence theorem does not hold, reported as a failed check
class CheckError(UrnError):
    pass


class NoAttractingPoint(CheckError):
    pass


class InitialMassZero(CheckError):
    pass


class AllSamplesExcluded(CheckError):
    pass


class ComputationError(UrnError):
    pass


class TooManyOutcomes(ComputationError):
    pass


class ScheduleExhausted(ComputationError):
    pass


class MapDomainError(ComputationError):
    pass
