"""Quick end-to-end check of the Python bindings."""

import math
import tempfile
from pathlib import Path

import halluc


def main():
    facts = halluc.EventSet(8, [0, 1, 2, 3])
    q = halluc.Dist.uniform(facts)
    p = halluc.Dist(8, [(0, 0.5), (7, 0.5)])

    assert math.isclose(halluc.hall(p, facts), 0.5)
    assert math.isclose(halluc.tv(p, q), 0.75)
    assert halluc.kl(p, q) == math.inf
    assert math.isclose(halluc.info(q), math.log(4))
    assert halluc.required_sample_size(8, 0.1, 0.1) == 2516
    assert math.isclose(halluc.entropy_threshold("bits"), 0.0765204118, rel_tol=1e-8)

    s = halluc.sample(q, 20, seed=3)
    assert s.points == halluc.sample(q, 20, seed=3).points
    assert set(s.points) <= set(facts.members)
    assert math.isclose(halluc.info(q, "out-of-sample", s), 1 - q.mass(s.distinct()))

    empirical = halluc.learn({"kind": "empirical"}, s)
    assert math.isclose(sum(empirical["dist"]["weights"].values()), 1.0)

    scenario = halluc.adversary("theorem3", {"d": 4, "eps_prime": 0.3}, seed=1)
    learner = {
        "kind": "improper_max_info",
        "measure": {"kind": "out_of_sample"},
        "eps": 0.1,
        "concepts": scenario["concepts"],
    }
    q3 = halluc.Dist.from_json(scenario["instance"]["q"])
    model = halluc.learn(learner, halluc.sample(q3, 10, seed=2))
    assert model["solver_report"]["status"] == "optimal"

    config = {
        "construction": {"name": "theorem3", "params": {"d": 4, "eps_prime": 0.3}},
        "learner": {"kind": "improper_max_info", "measure": {"kind": "out_of_sample"}},
        "n_values": [2, 32],
        "trials": 40,
        "epsilon": 0.1,
        "delta": 0.1,
        "base_seed": 7,
    }
    with tempfile.TemporaryDirectory() as out:
        result = halluc.run_experiment(config, out)
        assert (Path(out) / "trials.jsonl").exists()
    assert len(result["records"]) == 80
    assert result == halluc.run_experiment(config)
    rows = halluc.curve(config)
    assert [r["n"] for r in rows] == [2, 32]

    try:
        halluc.Dist(4, [(0, 0.3)])
    except ValueError:
        pass
    else:
        raise AssertionError("unnormalized weights accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
