"""Exception types raised across the package."""


class CeterisError(Exception):
    """Base class for every error raised by this package."""


class SpecError(CeterisError):
    """A preference specification failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class OutcomeMismatch(CeterisError):
    """An outcome is not a total assignment over the specification's variables."""


class VariableMismatch(CeterisError):
    """Two specifications do not declare identical variables and domains."""


class TooLarge(CeterisError):
    """The explicit engine was asked to materialise too many outcomes."""


class NodeBudgetExceeded(CeterisError):
    """A decision diagram manager ran past its node budget."""

    def __init__(self, budget, message=None):
        self.budget = budget
        if message is None:
            message = (
                f"BDD node budget of {budget} nodes exceeded; raise --node-budget, "
                "use the explicit engine, or replay the emitted SMV model externally"
            )
        super().__init__(message)


class ManagerMismatch(CeterisError):
    """Decision diagrams from different managers were combined."""


class ShapeMismatch(CeterisError):
    """A proof's kind does not fit the query it is offered for."""


class InternalInconsistency(CeterisError):
    """An engine invariant broke; this always indicates a bug."""


class CheckerNotFound(CeterisError):
    """The external model checker executable does not exist."""


class CheckerParseFailure(CeterisError):
    """The external model checker printed something we cannot interpret."""

    def __init__(self, message, raw=""):
        self.raw = raw
        super().__init__(message)


class XmlError(CeterisError):
    """Base class for XML input problems."""


class MalformedXml(XmlError):
    pass


class UndefinedVariable(XmlError):
    def __init__(self, name, where=None):
        self.name = name
        self.where = where
        loc = f" (in {where})" if where else ""
        super().__init__(
            f"variable {name!r} is not defined in the preference specification{loc}"
        )


class UndefinedValue(XmlError):
    def __init__(self, variable, value, where=None):
        self.variable = variable
        self.value = value
        self.where = where
        loc = f" (in {where})" if where else ""
        super().__init__(
            f"value {value!r} is not in the domain of variable {variable!r}{loc}"
        )


class MalformedCondition(XmlError):
    pass


class MalformedPreference(XmlError):
    pass


class UnknownQueryKind(XmlError):
    pass


class IncompleteOutcome(XmlError):
    pass
