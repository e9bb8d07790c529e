class Error(Exception):
    pass


class PrepareError(Error):
    pass


class ConfigurationError(Error):
    pass


class SpaceError(Error):
    pass


class HartreeError(Error):
    pass


class BogoliubovError(Error):
    pass


class CovarianceError(Error):
    pass


class FockError(Error):
    pass


class KrylovError(FockError):
    pass


class XiError(Error):
    pass


class StudyError(Error):
    pass
