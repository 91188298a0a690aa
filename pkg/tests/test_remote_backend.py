import json

import httpx
import pytest

from tcva.aggregation import VerdictLevel
from tcva.errors import JudgeError, JudgeTransportError
from tcva.judge import ChatCompletionJudge, EvaluationSample, MetricConfig, RetryPolicy, VerdictCache, evaluate_sample

SAMPLE = EvaluationSample(id="r1", question="q?", answer="Water boils at 100 C.", contexts=("Water boils at 100 C.",))


def make_judge(handler, **kw):
    client = httpx.Client(transport=httpx.MockTransport(handler))
    return ChatCompletionJudge(model_id="judge-x", endpoint="https://judge.test/v1/", client=client, **kw)


def completion(content):
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def test_request_shape_and_auth(monkeypatch):
    monkeypatch.setenv("TEST_JUDGE_KEY", "sekret")
    seen = []

    def handler(request):
        seen.append(request)
        body = json.loads(request.content)
        if "claims" in body["messages"][0]["content"].lower():
            return completion('{"claims": ["Water boils at 100 C."]}')
        return completion('```json\n{"context_excerpt": "Water boils", "reasoning": "stated", "verdict": "Fully"}\n```')

    judge = make_judge(handler, api_key_env="TEST_JUDGE_KEY")
    entry = evaluate_sample(SAMPLE, MetricConfig(), judge, VerdictCache(), RetryPolicy(base_delay=0))
    assert entry.levels == [VerdictLevel.FULLY]
    assert entry.judge_model_id == "judge-x"
    req = seen[0]
    assert str(req.url) == "https://judge.test/v1/chat/completions"
    assert req.headers["authorization"] == "Bearer sekret"
    body = json.loads(req.content)
    assert body["model"] == "judge-x"
    assert body["temperature"] == 0
    assert body["response_format"] == {"type": "json_object"}


def test_no_key_no_header(monkeypatch):
    monkeypatch.delenv("MISSING_KEY_VAR", raising=False)
    seen = []

    def handler(request):
        seen.append(request)
        return completion("{}")

    make_judge(handler, api_key_env="MISSING_KEY_VAR").complete(
        _request()
    )
    assert "authorization" not in seen[0].headers


def _request():
    from tcva.judge.backends import EXTRACT, JudgeRequest

    return JudgeRequest(EXTRACT, [{"role": "user", "content": "hi"}], SAMPLE, MetricConfig())


@pytest.mark.parametrize("status", [429, 500, 503])
def test_retryable_status(status):
    judge = make_judge(lambda r: httpx.Response(status))
    with pytest.raises(JudgeTransportError):
        judge.complete(_request())


def test_client_error_not_transport():
    judge = make_judge(lambda r: httpx.Response(401, text="bad key"))
    with pytest.raises(JudgeError) as exc:
        judge.complete(_request())
    assert not isinstance(exc.value, JudgeTransportError)


def test_network_error_is_transport():
    def handler(request):
        raise httpx.ConnectError("refused")

    with pytest.raises(JudgeTransportError):
        make_judge(handler).complete(_request())


def test_malformed_body():
    with pytest.raises(JudgeTransportError):
        make_judge(lambda r: httpx.Response(200, json={"nope": 1})).complete(_request())


def test_retry_recovers_after_503():
    state = {"n": 0}

    def handler(request):
        state["n"] += 1
        if state["n"] == 1:
            return httpx.Response(503)
        body = json.loads(request.content)
        if "claims" in body["messages"][0]["content"].lower():
            return completion('{"claims": ["Water boils at 100 C."]}')
        return completion('{"verdict": "Mostly", "reasoning": "r"}')

    entry = evaluate_sample(SAMPLE, MetricConfig(), make_judge(handler), VerdictCache(), RetryPolicy(base_delay=0))
    assert entry.levels == [VerdictLevel.MOSTLY]
    assert state["n"] == 3
