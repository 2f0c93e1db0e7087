"""Smoke test for the scong_py extension. Run after `pip install --no-build-isolation crates/python`."""
import pathlib

import scong_py

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def read(name):
    return (DATA / f"{name}.json").read_text()


def main():
    plane = scong_py.ToricMonoid.orthant(2)
    assert plane.rank == 2
    assert sorted(plane.hilbert_basis()) == [[0, 1], [1, 0]]

    d, chain = plane.krull_dim()
    assert d == 2 and len(chain) == 3
    for lo, hi in zip(chain, chain[1:]):
        assert lo.contains(hi) and not hi.contains(lo)

    bottom = plane.trivial()
    assert bottom.height() == 0
    top = chain[-1]
    assert len(bottom.chain_to(top)) == top.height() + 1
    assert bottom.count_chains(top, 2) >= 1

    torus = scong_py.ToricMonoid.torus(2)
    c = torus.congruence(0, [[1, 1]], ["1/2"])
    assert c.member([1, 1], [0, 0], "0", "1/2")
    assert not c.member([1, 1], [0, 0])
    assert c.height() == 1

    verdict = scong_py.classify(read("x0_y13"))
    assert verdict["verdict"] == "Strong", verdict
    strong = scong_py.Congruence.from_json(read("x0_y13"))
    assert strong.to_dict()["height"]["N"] >= 1

    assert scong_py.global_dim(read("p2")) == 2
    assert scong_py.is_domain(read("mu2"))

    try:
        scong_py.ToricMonoid(2, [[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1]]).congruence(99, [], [])
    except scong_py.ScongError:
        pass
    else:
        raise AssertionError("bad face index accepted")

    print("scong_py smoke test: ok")


if __name__ == "__main__":
    main()
