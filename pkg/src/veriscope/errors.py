"""Exception hierarchy shared across all pipeline stages."""


class VeriscopeError(Exception):
    """Base class for every error raised by this package."""


class ProviderUnavailable(VeriscopeError):
    """A remote provider (negation, embedding, verdict) could not be reached."""


class DegenerateNegation(VeriscopeError):
    """A negation provider returned empty text or text equivalent to the input."""


class SourceUnavailable(VeriscopeError):
    """A knowledge source failed; the pipeline continues with the others."""


class MalformedDocument(VeriscopeError):
    """A corpus line failed the document schema. Carries the 1-based line number."""

    def __init__(self, lineno: int, reason: str):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")


class EmptyCorpus(VeriscopeError):
    """Indexing produced zero valid documents."""


class ZeroVector(VeriscopeError, ValueError):
    """Cosine similarity is undefined for a zero-norm vector."""


class SelectionFailed(VeriscopeError):
    """Embedding failed while selecting sentences from one document."""


class RankingFailed(VeriscopeError):
    """Embedding failed while ranking evidence candidates against the claim."""


class TemplateMissingPlaceholder(VeriscopeError, ValueError):
    """A prompt template lacks one of the required placeholders."""


class NoValidOption(VeriscopeError):
    """The verdict provider assigned probability to none of the option letters."""


class WrongArity(VeriscopeError, ValueError):
    """An operation received the wrong number of inputs."""


class TooFewSamples(VeriscopeError, ValueError):
    """Dispersion needs at least two values."""


class DegenerateSamples(VeriscopeError, ValueError):
    """Density estimation needs samples with nonzero spread."""


class UnknownGoldLabel(VeriscopeError, ValueError):
    """A gold label does not belong to the label scheme."""


class EmptyDataset(VeriscopeError):
    """A claims file contained no usable records."""


class ConfigurationError(VeriscopeError):
    """Providers or the CLI were configured inconsistently (e.g. remote in mock mode)."""
