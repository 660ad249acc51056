import re

import pytest

from cubelab_sdk import (ClientSession, ConnectionRefused, ServerError, ToolCall,
                         Transcript, react_loop, replay_transcript)

PLAN_TOKEN = re.compile(r"([URFDLB])([123])")


def expand(plan_text: str) -> list[str]:
    moves = []
    for face, power in PLAN_TOKEN.findall(plan_text):
        n = int(power)
        if n == 1:
            moves.append(face)
        elif n == 2:
            moves.extend([face, face])
        else:
            moves.append(face + "'")
    return moves


def oracle_callback(history, observation):
    """The scripted ceiling agent: plan from the symbolic state, submit, finish."""
    if observation.kind != "text":
        return [ToolCall("final_answer")]
    plan = None
    for trace in history:
        for result in trace.results:
            if result.endswith("f)") and not result.startswith("Error"):
                plan = result
    if plan is None:
        return [ToolCall("call_golden_planner", {"representation": observation.text})]
    return [ToolCall("submit_moves", {"moves": expand(plan)}),
            ToolCall("final_answer")]


def test_connect_and_basic_tools(address):
    session = ClientSession.connect(address, {"tier": "full_symbolic",
                                              "metric": "sticker",
                                              "scramble": {"seed": 9, "length": 1}})
    obs = session.get_observation()
    assert obs.kind == "text" and len(obs.text) == 54
    # the scramble was a single move; its inverse solves and rewards +12
    reward = None
    for move in ("U", "U'", "D", "D'", "R", "R'", "L", "L'", "F", "F'", "B", "B'"):
        reward = session.make_move(move)
        if session.status == "passed":
            break
        session.make_move(move + "'" if not move.endswith("'") else move[:-1])
    assert session.status == "passed"
    verdict = session.final_answer("")
    assert verdict["passed"] is True


def test_connect_refused():
    with pytest.raises(ConnectionRefused):
        ClientSession.connect(("127.0.0.1", 9), {"tier": "full_symbolic",
                                                 "scramble": {"seed": 0, "length": 1}})


def test_bad_tier_surfaces_structured_error(address):
    with pytest.raises(ServerError) as err:
        ClientSession.connect(address, {"tier": "sideways",
                                        "scramble": {"seed": 0, "length": 1}})
    assert err.value.code == "BAD_ARGS"


def test_planner_error_strings_arrive_byte_identical(address):
    session = ClientSession.connect(address, {"tier": "full_symbolic",
                                              "solver_tool": "standard",
                                              "scramble": {"seed": 3, "length": 6}})
    bad = "FFUBULUBURRRRRRRRRURDFFRUULDDRRDDLRURRUULUULULBDFBDFUU"
    text = session.call_planner(bad)
    assert text == (f"Error: Cube definition string {bad} does not contain exactly "
                    "9 facelets of each color.")
    session.close()


def test_vertex_tier_images_decode(address):
    session = ClientSession.connect(address, {"tier": "vertex_view",
                                              "scramble": {"seed": 4, "length": 5}})
    obs = session.get_observation()
    assert obs.kind == "image"
    assert obs.image.size == (84, 84)
    ack = session.apply_view_transformation("view_right")
    assert ack.kind == "status"
    session.close()


def test_make_move_reward_on_depth_one_case(address, case_ids):
    depth1 = [cid for cid in case_ids if cid.startswith("d01")][0]
    session = ClientSession.connect(address, {"tier": "full_symbolic",
                                              "metric": "sticker",
                                              "solver_tool": "ideal",
                                              "case_id": depth1})
    obs = session.get_observation()
    plan = session.call_golden_planner(obs.text)
    rewards = session.submit_moves(expand(plan))
    assert session.status == "passed"
    assert len(rewards) == 1
    session.close()


@pytest.fixture(scope="module")
def oracle_transcripts(address, case_ids):
    transcripts = []
    for case_id in case_ids:
        session = ClientSession.connect(address, {"tier": "full_symbolic",
                                                  "solver_tool": "ideal",
                                                  "case_id": case_id})
        transcripts.append(react_loop(session, oracle_callback, max_steps=20))
    return transcripts


def test_oracle_agent_full_manifest_pass_rate(oracle_transcripts, case_ids):
    passed = sum(1 for t in oracle_transcripts if t.passed)
    assert passed == len(case_ids) == 20


def test_transcripts_serialize_and_replay(oracle_transcripts, address):
    for transcript in oracle_transcripts[:5]:
        wire = transcript.to_json()
        back = Transcript.from_json(wire)
        assert back.final_status == transcript.final_status
        again = replay_transcript(back, address)
        assert again.final_status == transcript.final_status
        assert again.passed == transcript.passed


def test_callback_error_recorded_not_raised(address):
    session = ClientSession.connect(address, {"tier": "full_symbolic",
                                              "scramble": {"seed": 7, "length": 4}})

    def broken(history, observation):
        raise RuntimeError("agent crashed")

    transcript = react_loop(session, broken, max_steps=20)
    assert transcript.callback_error == "RuntimeError: agent crashed"
    assert transcript.passed is False


def test_idle_callback_fails_budget(address):
    session = ClientSession.connect(address, {"tier": "full_symbolic",
                                              "scramble": {"seed": 8, "length": 4},
                                              "max_steps": 5})

    def idle(history, observation):
        return []

    transcript = react_loop(session, idle, max_steps=20)
    assert transcript.final_status == "failed_budget"
    assert not transcript.passed


def test_final_answer_on_unsolved_records_failure(address):
    session = ClientSession.connect(address, {"tier": "full_symbolic",
                                              "scramble": {"seed": 11, "length": 6}})
    verdict = session.final_answer("")
    assert verdict["passed"] is False
