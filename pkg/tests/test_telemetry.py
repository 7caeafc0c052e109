"""Telemetry: frame encoding, command decoding, and the live server loop."""

import asyncio
import json
from dataclasses import replace

import pytest
import websockets

from balancebot.control import GainSet
from balancebot.errors import ConfigError
from balancebot.sensors import NoiseConfig
from balancebot.simloop import ControllerSpec, ReferenceSource, Scenario
from balancebot.plant import PlantState
from balancebot.telemetry import (
    Pause,
    ProtocolError,
    Reset,
    Resume,
    SetGains,
    SetReference,
    TelemetryFrame,
    TelemetryServer,
    decode_command,
    encode_error,
    encode_frame,
)

LIVE = Scenario(
    noise=NoiseConfig(ir_sigma=0.0),
    reference=ReferenceSource(mode="live", range=0.5),
)


def make_frame(**kwargs):
    fields = dict(
        t=0.02, p=0.001234567, theta=-0.05, p_dot=0.0, theta_dot=1.25,
        x_est=0.0012, v_est=-0.5, d=0.0001, d_prime=0.25, u=-0.333333333,
        reference=0.0,
    )
    fields.update(kwargs)
    return TelemetryFrame(**fields)


# -- encoding -----------------------------------------------------------------

def test_encode_frame_key_order_and_trimming():
    text = encode_frame(make_frame())
    assert text == (
        '{"type":"state","t":0.02,"p":0.001235,"theta":-0.05,"p_dot":0,'
        '"theta_dot":1.25,"x_est":0.0012,"v_est":-0.5,"d":0.0001,'
        '"d_prime":0.25,"u":-0.333333,"reference":0}'
    )


def test_encode_frame_is_valid_json_without_force():
    obj = json.loads(encode_frame(make_frame()))
    assert obj["type"] == "state"
    assert "force" not in obj
    assert set(obj) == {
        "type", "t", "p", "theta", "p_dot", "theta_dot",
        "x_est", "v_est", "d", "d_prime", "u", "reference",
    }


def test_encode_normalizes_negative_zero():
    assert '"p":0,' in encode_frame(make_frame(p=-0.0))
    assert '"p":0,' in encode_frame(make_frame(p=-1e-9))  # rounds to -0.000000


def test_encode_error():
    assert encode_error("boom") == '{"type":"error","msg":"boom"}'


# -- decoding -----------------------------------------------------------------

def test_decode_set_reference_clamps():
    assert decode_command('{"type":"set_reference","value":0.2}', 0.5) == SetReference(0.2)
    assert decode_command('{"type":"set_reference","value":9}', 0.5) == SetReference(0.5)
    assert decode_command('{"type":"set_reference","value":-9}', 0.5) == SetReference(-0.5)


def test_decode_set_gains():
    cmd = decode_command(
        '{"type":"set_gains",'
        '"gains":{"k_err":-0.1,"k_d":-2,"k_dd":-0.5,"k_v":0.1}}',
        0.5,
    )
    assert cmd == SetGains(GainSet(k_err=-0.1, k_d=-2.0, k_dd=-0.5, k_v=0.1))


def test_decode_simple_commands():
    assert decode_command('{"type":"pause"}', 0.5) == Pause()
    assert decode_command('{"type":"resume"}', 0.5) == Resume()
    assert decode_command('{"type":"reset"}', 0.5) == Reset()


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1,2]",
        '{"no_type":1}',
        '{"type":"warp"}',
        '{"type":"set_reference"}',
        '{"type":"set_reference","value":"far"}',
        '{"type":"set_reference","value":true}',
        '{"type":"set_gains","k_err":1}',
        '{"type":"set_gains","gains":{"k_err":1}}',
        '{"type":"set_gains","gains":{"k_err":0,"k_d":0,"k_dd":0,"k_v":false}}',
        '{"type":"set_gains","gains":{"k_err":0,"k_d":0,"k_dd":0,"k_v":0,"k_x":1}}',
        '{"type":"pause","extra":1}',
    ],
)
def test_decode_rejects(text):
    with pytest.raises(ProtocolError):
        decode_command(text, 0.5)


# -- server -------------------------------------------------------------------

def test_server_rejects_non_live_scenario():
    with pytest.raises(ConfigError, match="live"):
        TelemetryServer(Scenario())


def test_publish_cadence_default():
    assert TelemetryServer(LIVE).publish_every == 20  # 50 Hz at a 1 ms tick


async def _connect_when_listening(port):
    # server.run() binds asynchronously; retry until the listener is up
    for _ in range(200):
        try:
            return await websockets.connect(
                f"ws://127.0.0.1:{port}", open_timeout=5
            )
        except OSError:
            await asyncio.sleep(0.01)
    raise RuntimeError(f"server on port {port} never started listening")


async def _with_server(scenario, port, body):
    server = TelemetryServer(scenario, port=port)
    task = asyncio.create_task(server.run())
    try:
        client = await _connect_when_listening(port)
        try:
            await body(server, client)
        finally:
            await client.close()
    finally:
        server.stop()
        task.cancel()


def run_server_test(scenario, port, body):
    asyncio.run(asyncio.wait_for(_with_server(scenario, port, body), timeout=30))


async def recv_state(client):
    while True:
        msg = json.loads(await client.recv())
        if msg["type"] == "state":
            return msg


def test_server_streams_state_frames():
    async def body(server, client):
        first = await recv_state(client)
        second = await recv_state(client)
        assert set(first) == {
            "type", "t", "p", "theta", "p_dot", "theta_dot",
            "x_est", "v_est", "d", "d_prime", "u", "reference",
        }
        assert second["t"] > first["t"]

    run_server_test(LIVE, 8951, body)


def test_server_set_reference_roundtrip():
    async def body(server, client):
        await recv_state(client)
        await client.send('{"type":"set_reference","value":2.0}')
        for _ in range(30):
            msg = await recv_state(client)
            if msg["reference"] == 0.5:  # clamped to range
                return
        raise AssertionError("reference change never reflected")

    run_server_test(LIVE, 8952, body)


def test_server_pause_resume_reset():
    async def body(server, client):
        await recv_state(client)
        await client.send('{"type":"pause"}')
        await asyncio.sleep(0.1)
        # drain whatever was in flight, then expect silence
        try:
            while True:
                await asyncio.wait_for(client.recv(), timeout=0.25)
        except asyncio.TimeoutError:
            pass
        assert server.paused
        await client.send('{"type":"resume"}')
        resumed = await recv_state(client)
        await client.send('{"type":"reset"}')
        await asyncio.sleep(0.05)
        for _ in range(30):
            msg = await recv_state(client)
            if msg["t"] < resumed["t"]:
                return
        raise AssertionError("reset never rewound time")

    run_server_test(LIVE, 8953, body)


def test_server_reports_protocol_errors_and_keeps_going():
    async def body(server, client):
        await recv_state(client)
        await client.send("garbage")
        while True:
            msg = json.loads(await client.recv())
            if msg["type"] == "error":
                assert "JSON" in msg["msg"]
                break
        await recv_state(client)  # stream continues

    run_server_test(LIVE, 8954, body)


def test_server_rejects_set_gains_for_lqr():
    scenario = replace(LIVE, controller=ControllerSpec(type="lqr"))

    async def body(server, client):
        await recv_state(client)
        await client.send(
            '{"type":"set_gains","gains":{"k_err":0,"k_d":0,"k_dd":0,"k_v":0}}'
        )
        while True:
            msg = json.loads(await client.recv())
            if msg["type"] == "error":
                assert "pd" in msg["msg"]
                break

    run_server_test(scenario, 8955, body)


def test_server_fall_sends_error_and_pauses():
    # theta0 = 0.1 with zero gains topples after ~0.37 s of streaming, so the
    # client is connected well before the one-shot fall error goes out
    doomed = replace(
        LIVE,
        initial=PlantState(theta=0.1),
        controller=ControllerSpec(type="pd", gains=GainSet(0, 0, 0, 0)),
    )

    async def body(server, client):
        saw_state = False
        while True:
            msg = json.loads(await client.recv())
            if msg["type"] == "state":
                saw_state = True
            if msg["type"] == "error":
                assert "fallen" in msg["msg"]
                break
        assert saw_state  # joined before the fall, stream was live
        await asyncio.sleep(0.05)
        assert server.paused
        assert server.runtime.fallen
        # resume alone must not restart a fallen run; reset must
        await client.send('{"type":"resume"}')
        await asyncio.sleep(0.1)
        assert server.paused
        await client.send('{"type":"reset"}')
        # the rewound episode runs again and falls again: a fresh error
        while True:
            msg = json.loads(await asyncio.wait_for(client.recv(), timeout=5))
            if msg["type"] == "error":
                assert "fallen" in msg["msg"]
                break

    run_server_test(doomed, 8956, body)
