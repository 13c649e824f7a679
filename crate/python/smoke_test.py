"""Exercise the compiled `frink` module end to end. Run after `maturin develop`."""

import math
import os
import tempfile

import frink


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    k = frink.AffinityMatrix.newtonian(60, 1.0)
    assert k.n == 60
    assert close(k.get(0, 59), 1 / 59)

    lam = frink.compute_lambda_sequence(k)
    expected = [1 / 59, 1 / 27, 1 / 9, 1 / 3, 1.0]
    assert len(lam) == 5 and lam.iterations == 4
    assert all(close(a, b) for a, b in zip(lam.values, expected))
    assert lam.inverse(0.5) == 4

    five = frink.compute_lambda_sequence(k, diagonal_band=5)
    assert close(five.values[-1], 0.5)

    u = frink.BinaryRelation.band(4, 1)
    assert u.covering_index(10) == 3
    assert u.power3().is_full()
    top = frink.BinaryRelation.level_set(k, lam.values[-1])
    assert top == frink.BinaryRelation.band(60, 1)

    delta = frink.delta_matrix(k, lam)
    chain = frink.chain_metric(k, lam)
    assert delta[0][1] == 1 / 32
    assert all(0.5 <= chain[i][j] / delta[i][j] <= 1.0 for i in range(60) for j in range(60) if i != j)
    assert frink.quasi_triangle_constant(k, lam) <= 8

    report = frink.verify(k)
    assert report["passed"] is True
    assert report["sandwich"]["tightest_shift"] >= -1

    assert frink.delta_ball(k, lam, 50, 0.125, "upper") == [48, 49, 50, 51, 52]
    bands = frink.frink_annuli(k, lam, 50)
    green = [v for v, b in enumerate(bands["band_of"]) if b == 1]
    assert green == [48, 49, 51, 52]
    assert bands["palette"][:2] == ["yellow", "green"]

    e = frink.euclidean_distances(60, 25)
    f_ball = frink.delta_ball(k, lam, 25, 0.125, "upper")
    assert frink.jaccard(f_ball, frink.distance_ball(e, 25, 3.0)) == 1.0
    assert frink.annuli(e, 25, [1.0, 3.0])["band_of"][27] == 1

    ones = frink.AffinityMatrix([[1.0, 1.0], [1.0, 1.0]])
    d = frink.diffusion_distances(ones, 0.005)
    assert close(d[0][1], math.sqrt(2 * math.exp(-0.01)), 1e-12)
    values, vectors = frink.laplacian_spectrum(ones)
    assert close(values[0], -1.0) and close(values[1], 0.0)
    assert len(vectors) == 2

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "k.csv")
        k.save(path)
        assert frink.AffinityMatrix.load(path).to_list() == k.to_list()

    for bad in ([[1.0, 2.0], [3.0, 4.0]], [[1.0, 2.0, 3.0]]):
        try:
            frink.AffinityMatrix(bad)
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
