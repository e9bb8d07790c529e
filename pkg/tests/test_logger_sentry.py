import mock
import pytest

from mflab import BaseApplication, BaseConfig, Span
from mflab.logger.adapters import AdapterConfigurationError
from mflab.logger.adapters.sentry import SentryAdapter, SentryConfig

DSN = 'https://0e1fcbe44a5541c2bd20ed5ead2ca033@127.0.0.1:9/1'


async def test_success():
    cfg = SentryConfig(enabled=True, dsn=DSN)
    adapter = SentryAdapter(cfg)
    app = BaseApplication(BaseConfig())
    app.logger.add(adapter)
    lgr = app.logger

    with mock.patch(
        'mflab.logger.adapters.sentry.Client'
    ) as client, mock.patch('mflab.logger.adapters.sentry.Hub'), mock.patch(
        'mflab.logger.adapters.sentry.capture_exception'
    ) as capture:
        await lgr.start()
        client.assert_called_once_with(dsn=DSN)

        with pytest.raises(Exception):
            with lgr.span_new(name='t1', kind=Span.KIND_STUDY) as span:
                span.tag('tag', 'abc')
                with span.new_child('t2', Span.KIND_SOLVER):
                    raise Exception('bla bla')

        await lgr.stop()

    # the error passes through both spans but is reported once
    assert capture.call_count == 1
    err = capture.call_args[0][0]
    assert str(err) == 'bla bla'
    client.return_value.close.assert_called_once_with()


async def test_no_error_no_report():
    adapter = SentryAdapter(SentryConfig(enabled=True, dsn=DSN))
    app = BaseApplication(BaseConfig())
    app.logger.add(adapter)

    with mock.patch('mflab.logger.adapters.sentry.Client'), mock.patch(
        'mflab.logger.adapters.sentry.Hub'
    ), mock.patch(
        'mflab.logger.adapters.sentry.capture_exception'
    ) as capture:
        await app.logger.start()
        with app.logger.span_new(name='quiet'):
            pass
        await app.logger.stop()

    capture.assert_not_called()


async def test_missing_dsn():
    adapter = SentryAdapter(SentryConfig(enabled=True))
    app = BaseApplication(BaseConfig())
    app.logger.add(adapter)
    with pytest.raises(AdapterConfigurationError):
        await app.logger.start()
