"""Block-diagram ingestion: the block library, translation shape, loop
handling, and dataflow adequacy against direct simulation."""

import json
import random

import pytest

from rcrs.components import Atomic, Fdbk, Parallel, Serial, alpha_equivalent
from rcrs.compose import atomic, determ, loop_free
from rcrs.diagrams import (
    Block,
    BlockDiagram,
    Wire,
    library_block,
    load_diagram,
    translate,
)
from rcrs.errors import AlgebraicLoop, BadParams, PortMismatch, UnknownBlock
from rcrs.oracle import FiniteDomain, exec_det
from rcrs.syntax import parse_component


SUM_JSON = json.dumps(
    {
        "blocks": [
            {"id": "add", "kind": "Add", "params": {"ty": "int"}},
            {"id": "delay", "kind": "UnitDelay", "params": {"ty": "int", "init": 0}},
            {"id": "split", "kind": "Split", "params": {"ty": "int"}},
        ],
        "wires": [
            {"src": ["add", 0], "dst": ["delay", 0]},
            {"src": ["delay", 0], "dst": ["split", 0]},
            {"src": ["split", 0], "dst": ["add", 0]},
        ],
        "inputs": [["add", 1]],
        "outputs": [["split", 1]],
    }
)


class TestLibrary:
    def test_unit_delay(self, unit_delay):
        b = library_block("UnitDelay", {"ty": "int", "init": 0})
        assert alpha_equivalent(Atomic(b), Atomic(unit_delay))

    def test_const(self):
        b = library_block("Const", {"ty": "int", "c": 5})
        assert len(b.inputs) == 0
        assert exec_det(Atomic(b), ((), (),)) == ((5,), (5,))

    def test_integrator(self):
        b = library_block("Integrator", {"dt": 0.1})
        out = exec_det(Atomic(b), ((10,), (10,), (0,)))
        from fractions import Fraction

        assert out == ((Fraction(0),), (Fraction(1),), (Fraction(2),))

    def test_transfer_fcn_output(self):
        b = library_block("TransferFcn", {"dt": 0.01})
        out = exec_det(Atomic(b), ((1,),))
        # y = -8*s1 + 2*x with s1 = 0 initially
        assert out[0][0] == 2

    def test_unknown_block(self):
        with pytest.raises(UnknownBlock):
            library_block("Quux")

    def test_bad_params(self):
        with pytest.raises(BadParams):
            library_block("Const", {"ty": "int"})
        with pytest.raises(BadParams):
            library_block("Gain", {})


class TestTranslate:
    def test_delayed_sum_matches_worked_example(self):
        term = translate(load_diagram(SUM_JSON))
        assert determ(term) and loop_free(term)
        a = atomic(term)
        expected = parse_component("det((y:int), (s:int), (0), true, (s + y), (s))")
        assert alpha_equivalent(Atomic(a), expected)

    def test_delayed_sum_simulation(self, small_int_domain):
        term = translate(load_diagram(SUM_JSON))
        assert exec_det(term, ((1,), (1,), (1,), (1,))) == ((0,), (1,), (2,), (3,))

    def test_switch_figure_shape(self):
        text = json.dumps(
            {
                "blocks": [
                    {"id": "a", "kind": "Split", "params": {"ty": "int"}},
                    {"id": "b", "kind": "Swap", "params": {"ty": "int"}},
                    {"id": "c", "kind": "Add", "params": {"ty": "int"}},
                ],
                "wires": [
                    {"src": ["a", 0], "dst": ["b", 0]},
                    {"src": ["a", 1], "dst": ["b", 1]},
                    {"src": ["b", 0], "dst": ["c", 0]},
                    {"src": ["a", 0], "dst": ["c", 1]},
                ],
                "inputs": [["a", 0]],
                "outputs": [["c", 0], ["b", 1]],
            }
        )
        term = translate(load_diagram(text))

        def shape(c):
            if isinstance(c, Serial):
                return shape(c.left) + shape(c.right)
            if isinstance(c, Parallel):
                return ["par"]
            if isinstance(c, Atomic):
                return ["atom"]
            if isinstance(c, Fdbk):
                return ["fdbk"]

        assert shape(term) == ["atom", "atom", "par", "atom", "par"]
        # the two routers are exactly the worked switching components
        r1 = term.left.left.left.right.atom
        s1 = parse_component("stateless_det((x:int, y:int), true, (x, y, x))").atom
        assert alpha_equivalent(Atomic(r1), Atomic(s1))
        r2 = term.left.right.atom
        s2 = parse_component("stateless_det((u:int, v:int, x:int), true, (u, x, v))").atom
        assert alpha_equivalent(Atomic(r2), Atomic(s2))

    def test_single_block_no_wires(self):
        text = json.dumps(
            {
                "blocks": [{"id": "g", "kind": "Gain", "params": {"ty": "int", "k": 3}}],
                "wires": [],
                "inputs": [["g", 0]],
                "outputs": [["g", 0]],
            }
        )
        term = translate(load_diagram(text))
        assert isinstance(term, Atomic)
        assert exec_det(term, ((2,),)) == ((6,),)

    def test_empty_diagram(self):
        term = translate(load_diagram('{"blocks": [], "wires": [], "inputs": [], "outputs": []}'))
        assert isinstance(term, Atomic)

    def test_algebraic_loop_detected(self):
        text = json.dumps(
            {
                "blocks": [
                    {"id": "g1", "kind": "Gain", "params": {"ty": "int", "k": 1}},
                    {"id": "g2", "kind": "Gain", "params": {"ty": "int", "k": 1}},
                ],
                "wires": [
                    {"src": ["g1", 0], "dst": ["g2", 0]},
                    {"src": ["g2", 0], "dst": ["g1", 0]},
                ],
                "inputs": [],
                "outputs": [["g1", 0]],
            }
        )
        with pytest.raises(AlgebraicLoop) as err:
            translate(load_diagram(text))
        assert set(err.value.cycle) == {"g1", "g2"}

    def test_port_mismatches(self):
        base = {
            "blocks": [{"id": "g", "kind": "Gain", "params": {"ty": "int", "k": 1}}],
            "wires": [],
            "inputs": [["g", 0]],
            "outputs": [["g", 0]],
        }
        undriven = dict(base, inputs=[])
        with pytest.raises(PortMismatch):
            translate(load_diagram(json.dumps(undriven)))
        twice = dict(base, inputs=[["g", 0], ["g", 0]])
        with pytest.raises(PortMismatch):
            translate(load_diagram(json.dumps(twice)))
        out_of_range = dict(base, outputs=[["g", 3]])
        with pytest.raises(PortMismatch):
            translate(load_diagram(json.dumps(out_of_range)))

    def test_type_mismatch_on_wire(self):
        text = json.dumps(
            {
                "blocks": [
                    {"id": "a", "kind": "Gain", "params": {"ty": "int", "k": 1}},
                    {"id": "b", "kind": "Gain", "params": {"ty": "real", "k": 1}},
                ],
                "wires": [{"src": ["a", 0], "dst": ["b", 0]}],
                "inputs": [["a", 0]],
                "outputs": [["b", 0]],
            }
        )
        with pytest.raises(PortMismatch):
            translate(load_diagram(text))

    def test_subsystem_flattening(self):
        text = json.dumps(
            {
                "blocks": [
                    {
                        "id": "sub",
                        "subsystem": {
                            "blocks": [
                                {"id": "d", "kind": "UnitDelay", "params": {"ty": "int"}}
                            ],
                            "wires": [],
                            "inputs": [["d", 0]],
                            "outputs": [["d", 0]],
                        },
                    },
                    {"id": "g", "kind": "Gain", "params": {"ty": "int", "k": 2}},
                ],
                "wires": [{"src": ["sub", 0], "dst": ["g", 0]}],
                "inputs": [["sub", 0]],
                "outputs": [["g", 0]],
            }
        )
        term = translate(load_diagram(text))
        assert exec_det(term, ((3,), (5,))) == ((0,), (6,))

    def test_block_order_independent(self):
        data = json.loads(SUM_JSON)
        data["blocks"] = list(reversed(data["blocks"]))
        reordered = translate(load_diagram(json.dumps(data)))
        original = translate(load_diagram(SUM_JSON))
        assert reordered == original


class TestDataflowAdequacy:
    """Random diagrams over deterministic library blocks: the translated term
    behaves exactly like direct per-step dataflow simulation."""

    def _random_chain_diagram(self, rng: random.Random):
        """A random acyclic single-wire-width diagram over int blocks."""
        n = rng.randint(2, 4)
        kinds = ["Gain", "UnitDelay", "Id"]
        blocks = [
            {
                "id": f"b{i}",
                "kind": rng.choice(kinds),
                "params": {"ty": "int", "k": rng.randint(-2, 2)},
            }
            for i in range(n)
        ]
        for b in blocks:
            if b["kind"] != "Gain":
                b["params"].pop("k")
        wires = [
            {"src": [f"b{i}", 0], "dst": [f"b{i+1}", 0]} for i in range(n - 1)
        ]
        return json.dumps(
            {
                "blocks": blocks,
                "wires": wires,
                "inputs": [["b0", 0]],
                "outputs": [[f"b{n-1}", 0]],
            }
        )

    def _simulate_dataflow(self, text: str, trace):
        """Direct topological per-step evaluation, independent of translate."""
        data = json.loads(text)
        blocks = {b["id"]: b for b in data["blocks"]}
        state = {bid: 0 for bid, b in blocks.items() if b["kind"] == "UnitDelay"}
        order = [b["id"] for b in data["blocks"]]  # chains are listed in order
        outs = []
        for step in trace:
            values = {}
            ext = {tuple(p): v for p, v in zip(map(tuple, data["inputs"]), step)}
            for bid in order:
                b = blocks[bid]
                drv = [w for w in data["wires"] if w["dst"][0] == bid]
                if drv:
                    xin = values[tuple(drv[0]["src"])]
                else:
                    xin = ext[(bid, 0)]
                if b["kind"] == "Gain":
                    values[(bid, 0)] = b["params"]["k"] * xin
                elif b["kind"] == "Id":
                    values[(bid, 0)] = xin
                else:  # UnitDelay
                    values[(bid, 0)] = state[bid]
                    state[bid] = xin
            outs.append(tuple(values[tuple(p)] for p in map(tuple, data["outputs"])))
        return tuple(outs)

    def test_random_chains_agree(self):
        rng = random.Random(71)
        for _ in range(20):
            text = self._random_chain_diagram(rng)
            term = translate(load_diagram(text))
            for trace_seed in range(3):
                trng = random.Random(trace_seed)
                trace = tuple((trng.randint(-2, 2),) for _ in range(4))
                assert exec_det(term, trace) == self._simulate_dataflow(text, trace)
