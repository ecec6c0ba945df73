"""Exception types shared across the pipeline layers."""


class BlogwatchError(Exception):
    """Base class for all package-specific errors."""


class MalformedFeed(BlogwatchError):
    """A changes document could not be parsed at all."""


class NotAFeed(BlogwatchError):
    """Fetched content is not parseable as an RSS 2.0 feed."""


class FetchFailed(BlogwatchError):
    """Network failure, timeout, or HTTP status >= 400."""

    def __init__(self, url, reason):
        super().__init__(f"{url}: {reason}")
        self.url = url
        self.reason = reason


class OversizeBody(BlogwatchError):
    """Body exceeded the byte cap and could not be salvaged."""


class MediaSkipped(BlogwatchError):
    """Header probe classified the target as photo/audio/video content."""

    def __init__(self, url, content_type):
        super().__init__(f"{url}: media content-type {content_type}")
        self.url = url
        self.content_type = content_type


class EmptyCorpus(BlogwatchError):
    """Topic or background corpus contains no usable documents."""


class MissingClass(BlogwatchError):
    """Training data does not contain both class labels."""


class ModelRequired(BlogwatchError):
    """A Bayes decision was requested without a trained model."""


class ConfigError(BlogwatchError):
    """Run configuration is invalid; reported before any network activity."""


class SpecError(BlogwatchError):
    """Synthetic world specification is inconsistent."""
