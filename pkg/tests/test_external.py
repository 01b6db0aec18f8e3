import sys

import numpy as np
import pytest

from xshap import ExternalModel, ExternalModelError, LogGlm, NonPositivePredictionError

PROTO_PREAMBLE = '''\
import sys
if sys.stdin.readline().strip() != "XSHAP-PROTO 1":
    sys.exit(1)
sys.stdout.write("OK\\n")
sys.stdout.flush()
'''

ECHO_CLAMPED = PROTO_PREAMBLE + '''\
while True:
    req = sys.stdin.readline()
    if not req or req.strip() == "BYE":
        break
    _, n, m = req.split()
    for _ in range(int(n)):
        cells = sys.stdin.readline().strip().split(",")
        sys.stdout.write(repr(max(float(cells[0]), 0.1)) + "\\n")
    sys.stdout.flush()
'''

SHORT_REPLY = PROTO_PREAMBLE + '''\
req = sys.stdin.readline()
_, n, m = req.split()
for _ in range(int(n)):
    sys.stdin.readline()
for _ in range(int(n) - 1):
    sys.stdout.write("1.0\\n")
sys.stdout.flush()
sys.exit(0)
'''

NEGATIVE_REPLY = PROTO_PREAMBLE + '''\
req = sys.stdin.readline()
_, n, m = req.split()
for _ in range(int(n)):
    sys.stdin.readline()
for i in range(int(n)):
    sys.stdout.write("-1.0\\n" if i == 1 else "2.0\\n")
sys.stdout.flush()
'''

GARBAGE_REPLY = PROTO_PREAMBLE + '''\
req = sys.stdin.readline()
_, n, m = req.split()
for _ in range(int(n)):
    sys.stdin.readline()
print("this is not a number", file=sys.stderr)
for _ in range(int(n)):
    sys.stdout.write("pancake\\n")
sys.stdout.flush()
'''

BAD_HANDSHAKE = 'import sys\nsys.stdin.readline()\nsys.stdout.write("NOPE\\n")\nsys.stdout.flush()\n'


def _stub(tmp_path, source, name="stub.py"):
    path = tmp_path / name
    path.write_text(source)
    return [sys.executable, str(path)]


def test_echo_model_returns_clamped_first_column(tmp_path):
    X = np.array([[0.5, 9.0], [-3.0, 1.0], [2.25, 0.0]])
    with ExternalModel(_stub(tmp_path, ECHO_CLAMPED)) as model:
        np.testing.assert_array_equal(model.predict(X), [0.5, 0.1, 2.25])


def test_two_requests_reuse_one_subprocess(tmp_path):
    with ExternalModel(_stub(tmp_path, ECHO_CLAMPED)) as model:
        first = model.predict([[1.5, 0.0]])
        second = model.predict([[2.5, 0.0]])
    assert first[0] == 1.5 and second[0] == 2.5


def test_short_reply_is_a_protocol_error(tmp_path):
    with ExternalModel(_stub(tmp_path, SHORT_REPLY)) as model:
        with pytest.raises(ExternalModelError, match="truncated"):
            model.predict(np.ones((3, 2)))


def test_negative_reply_in_multiplicative_mode(tmp_path):
    with ExternalModel(_stub(tmp_path, NEGATIVE_REPLY)) as model:
        with pytest.raises(NonPositivePredictionError) as excinfo:
            model.predict(np.ones((3, 2)))
    assert excinfo.value.index == 1


def test_negative_reply_is_fine_in_additive_mode(tmp_path):
    with ExternalModel(_stub(tmp_path, NEGATIVE_REPLY), mode="additive") as model:
        np.testing.assert_array_equal(model.predict(np.ones((3, 2))), [2.0, -1.0, 2.0])


def test_garbage_reply_reports_stderr_diagnostics(tmp_path):
    with ExternalModel(_stub(tmp_path, GARBAGE_REPLY)) as model:
        with pytest.raises(ExternalModelError) as excinfo:
            model.predict(np.ones((2, 2)))
    assert "non-numeric" in str(excinfo.value)
    assert "not a number" in excinfo.value.diagnostics


def test_bad_handshake(tmp_path):
    with ExternalModel(_stub(tmp_path, BAD_HANDSHAKE)) as model:
        with pytest.raises(ExternalModelError, match="handshake"):
            model.predict(np.ones((1, 1)))


def test_unlaunchable_command():
    model = ExternalModel(["/no/such/binary/anywhere"])
    with pytest.raises(ExternalModelError, match="launch"):
        model.predict(np.ones((1, 1)))


def test_packaged_stub_matches_in_process_glm(rng):
    glm = LogGlm(alpha=0.3, betas=np.array([1.0, -2.0, 0.5]))
    command = [
        sys.executable,
        "-m",
        "xshap.extern_stub",
        "--alpha",
        repr(glm.alpha),
        "--beta",
        ",".join(repr(b) for b in glm.betas),
    ]
    X = rng.normal(size=(25, 3))
    with ExternalModel(command) as model:
        remote = model.predict(X)
    np.testing.assert_allclose(remote, glm.predict(X), rtol=1e-12)


def test_external_predictions_are_deterministic(tmp_path, rng):
    X = rng.normal(size=(10, 2))
    with ExternalModel(_stub(tmp_path, ECHO_CLAMPED)) as model:
        first = model.predict(X)
        second = model.predict(X)
    assert np.array_equal(first, second)
