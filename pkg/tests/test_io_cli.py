import json
import math
import os

import numpy as np
import pytest
from click.testing import CliRunner

import dck.metric
from dck.checks import run_battery
from dck.cli import main
from dck.errors import SchemaError
from dck.fixtures import fixture_names, fixture_path
from dck.report import canonical_dumps
from dck.surface_io import load_surface, surface_from_dict, surface_to_dict

runner = CliRunner()


def invoke(*args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def minimal_surface_dict(**overrides):
    base = {
        "schema_version": 1,
        "background": "euclidean",
        "vertices": [{"id": v, "alpha": 0.0, "f": 0.0} for v in range(3)],
        "edges": [
            {"i": 0, "j": 1, "eta": 1.0},
            {"i": 0, "j": 2, "eta": 1.0},
            {"i": 1, "j": 2, "eta": 1.0},
        ],
        "faces": [[0, 1, 2], [0, 2, 1]],
    }
    base.update(overrides)
    return base


class TestSchema:
    def test_roundtrip(self):
        surface = surface_from_dict(minimal_surface_dict())
        again = surface_from_dict(surface_to_dict(surface))
        assert surface_to_dict(again) == surface_to_dict(surface)

    def test_missing_schema_version(self):
        payload = minimal_surface_dict()
        del payload["schema_version"]
        with pytest.raises(SchemaError, match="schema_version"):
            surface_from_dict(payload)

    def test_face_referencing_missing_vertex(self):
        payload = minimal_surface_dict(faces=[[0, 1, 2], [0, 2, 9]])
        with pytest.raises(SchemaError, match=r"face \(0, 2, 9\)"):
            surface_from_dict(payload)

    def test_face_with_unlisted_edge(self):
        payload = minimal_surface_dict()
        payload["edges"] = payload["edges"][:2]
        with pytest.raises(SchemaError, match="not listed"):
            surface_from_dict(payload)

    def test_unknown_solver_key(self):
        payload = minimal_surface_dict(solver={"newton_damping": 0.5})
        with pytest.raises(SchemaError, match="newton_damping"):
            surface_from_dict(payload)

    def test_target_must_cover_vertices(self):
        payload = minimal_surface_dict(target_K=[{"id": 0, "K": 0.0}])
        with pytest.raises(SchemaError, match="every vertex"):
            surface_from_dict(payload)

    def test_obj_import(self, tmp_path):
        obj = tmp_path / "tetra.obj"
        obj.write_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
            "f 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\n",
            encoding="utf-8",
        )
        surface = load_surface(str(obj))
        t = surface.triangulation()
        assert t.num_vertices == 4 and t.num_faces == 4
        assert all(v == 0.0 for v in surface.alpha_by_id.values())
        assert all(v == 1.0 for v in surface.eta_by_pair.values())


class TestCanonicalJson:
    def test_float_formatting(self):
        text = canonical_dumps({"x": 2.0, "y": 1.0 / 3.0, "n": 5})
        assert '"x":2.0' in text
        assert '"y":0.33333333333333331' in text
        assert '"n":5' in text
        assert text.endswith("\n")

    def test_non_finite(self):
        assert canonical_dumps(float("inf")).strip() == '"inf"'
        assert canonical_dumps(float("nan")).strip() == '"nan"'


class TestValidateCommand:
    def test_fixture_passes(self):
        result = invoke("validate", "--input", str(fixture_path("tetrahedron_euclidean")))
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["report"]["compatibility"]["max_residual"] < 1e-12

    def test_all_fixtures_pass(self):
        for name in fixture_names():
            result = invoke("validate", "--input", str(fixture_path(name)))
            assert result.exit_code == 0, name

    def test_parse_error_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        result = invoke("validate", "--input", str(bad))
        assert result.exit_code == 2

    def test_missing_vertex_exits_2_and_names_face(self, tmp_path):
        path = write_json(
            tmp_path / "missing.json",
            minimal_surface_dict(faces=[[0, 1, 2], [0, 2, 7]]),
        )
        result = invoke("validate", "--input", path)
        assert result.exit_code == 2
        assert "7" in json.loads(result.output)["message"]

    def test_spherical_domain_violation_exits_3(self, tmp_path):
        payload = minimal_surface_dict(background="spherical")
        payload["vertices"][1]["alpha"] = 1.5  # alpha e^{2f} >= 1
        path = write_json(tmp_path / "sph.json", payload)
        result = invoke("validate", "--input", path)
        assert result.exit_code == 3
        assert "vertex 1" in json.loads(result.output)["message"]

    def test_nonmanifold_exits_3(self, tmp_path):
        payload = minimal_surface_dict(faces=[[0, 1, 2]])
        path = write_json(tmp_path / "open.json", payload)
        result = invoke("validate", "--input", path)
        assert result.exit_code == 3


class TestReportCommand:
    def test_tetrahedron_curvatures(self):
        result = invoke("report", "--input", str(fixture_path("tetrahedron_euclidean")))
        assert result.exit_code == 0
        body = json.loads(result.output)["report"]
        for vertex in body["vertices"]:
            assert vertex["K"] == pytest.approx(math.pi, abs=1e-12)

    def test_jacobian_block(self):
        result = invoke(
            "report", "--input", str(fixture_path("torus_euclidean")), "--jacobian"
        )
        body = json.loads(result.output)["report"]
        J = np.zeros((7, 7))
        for r, col, v in body["jacobian"]["entries"]:
            J[r, col] = v
        assert np.abs(J - J.T).max() < 1e-12
        assert np.abs(J.sum(axis=1)).max() < 1e-10

    def test_hyperbolic_report_carries_beta(self):
        result = invoke(
            "report", "--input", str(fixture_path("pillow_hyperbolic_spacelike"))
        )
        body = json.loads(result.output)["report"]
        assert {face["beta"] for face in body["faces"]} == {-1}

    def test_byte_identical_reruns(self):
        args = ("report", "--input", str(fixture_path("genus2_hyperbolic")), "--jacobian")
        assert invoke(*args).output == invoke(*args).output

    def test_figures_rendered(self, tmp_path):
        figdir = tmp_path / "figs"
        result = invoke(
            "report",
            "--input", str(fixture_path("torus_hyperbolic")),
            "--figures", str(figdir),
        )
        assert result.exit_code == 0
        assert (figdir / "report_summary.png").stat().st_size > 0


class TestCheckDerivativesCommand:
    def test_single_fixture(self):
        result = invoke(
            "check-derivatives",
            "--input", str(fixture_path("pillow_hyperbolic_negative_alpha")),
            "--seed", "3",
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["pass"] is True
        categories = body["surfaces"][0]["categories"]
        assert set(categories) == {
            "lengths", "angles", "areas", "curvature_jacobian", "functional_gradient"
        }

    def test_fixture_dir_override(self, tmp_path, monkeypatch):
        src = fixture_path("tetrahedron_euclidean").read_text(encoding="utf-8")
        (tmp_path / "only.json").write_text(src, encoding="utf-8")
        monkeypatch.setenv("DCK_FIXTURES", str(tmp_path))
        result = invoke("check-derivatives")
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert [s["surface"] for s in body["surfaces"]] == ["only"]

    def test_injected_sign_bug_fails(self, monkeypatch):
        true_face_duality = dck.metric.face_duality

        def flipped(pm, face):
            fd = true_face_duality(pm, face)
            return dck.metric.FaceDuality(
                face=fd.face,
                embedding=fd.embedding,
                edge_centers=fd.edge_centers,
                center=fd.center,
                beta=fd.beta,
                concurrency_residual=fd.concurrency_residual,
                heights=tuple(-h for h in fd.heights),
            )

        monkeypatch.setattr(dck.metric, "face_duality", flipped)
        surface = load_surface(str(fixture_path("tetrahedron_euclidean")))
        outcome = run_battery(surface, seed=0, perturbations=0)
        assert outcome["pass"] is False

        result = invoke(
            "check-derivatives",
            "--input", str(fixture_path("tetrahedron_euclidean")),
        )
        assert result.exit_code == 4

    def test_near_degenerate_is_loud_or_clean(self, tmp_path):
        # squeezing one face close to degeneracy must either still verify
        # or raise a domain error; silent mismatches are the failure mode
        payload = json.loads(
            fixture_path("torus_euclidean").read_text(encoding="utf-8")
        )
        payload["edges"][0]["eta"] = 3.9  # face degenerates at eta = 4
        path = write_json(tmp_path / "stress.json", payload)
        surface = load_surface(path)
        from dck.errors import DckError

        try:
            outcome = run_battery(surface, seed=0, perturbations=0)
        except DckError:
            return
        assert outcome["pass"] is True


class TestUniformizeCommand:
    def test_torus_flat_target(self, tmp_path):
        out = tmp_path / "solved.json"
        perturbed = json.loads(
            fixture_path("torus_euclidean").read_text(encoding="utf-8")
        )
        rng = np.random.default_rng(58)
        for v in perturbed["vertices"]:
            v["f"] = float(rng.uniform(-0.3, 0.3))
        path = write_json(tmp_path / "torus.json", perturbed)

        result = invoke(
            "uniformize", "--input", path, "--target-k", "zero",
            "--output", str(out),
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["trace"]["status"] == "converged"
        assert body["trace"]["iterations"][-1]["residual_norm"] < 1e-10

        solved = load_surface(str(out))
        t = solved.triangulation()
        from dck.variation import vertex_curvatures

        K = vertex_curvatures(solved.conformal(t))
        assert np.abs(K).max() < 1e-10

    def test_genus2_hyperbolic_area(self, tmp_path):
        result = invoke(
            "uniformize",
            "--input", str(fixture_path("genus2_hyperbolic")),
            "--target-k", "zero",
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        solved = surface_from_dict(body["solution"])
        t = solved.triangulation()
        from dck.variation import face_area

        c = solved.conformal(t)
        assert sum(face_area(c, f) for f in t.faces) == pytest.approx(
            4.0 * math.pi, abs=1e-8
        )

    def test_infeasible_target_exits_6(self, tmp_path):
        result = invoke(
            "uniformize",
            "--input", str(fixture_path("torus_euclidean")),
            "--target-k", write_json(
                tmp_path / "target.json",
                [{"id": v, "K": 0.01} for v in range(7)],
            ),
        )
        assert result.exit_code == 6
        body = json.loads(result.output)
        assert body["gauss_bonnet"]["two_pi_chi"] == pytest.approx(0.0)
        assert body["gauss_bonnet"]["target_total"] == pytest.approx(0.07)

    def test_iteration_limit_exits_5(self, tmp_path):
        perturbed = json.loads(
            fixture_path("torus_euclidean").read_text(encoding="utf-8")
        )
        rng = np.random.default_rng(59)
        for v in perturbed["vertices"]:
            v["f"] = float(rng.uniform(-0.3, 0.3))
        path = write_json(tmp_path / "torus.json", perturbed)
        result = invoke(
            "uniformize", "--input", path, "--target-k", "zero", "--max-iter", "1"
        )
        assert result.exit_code == 5
        assert json.loads(result.output)["trace"]["status"] == "iteration_limit"

    def test_uniform_target_euclidean(self):
        result = invoke(
            "uniformize",
            "--input", str(fixture_path("tetrahedron_euclidean")),
            "--target-k", "uniform",
        )
        assert result.exit_code == 0

    def test_trace_figure(self, tmp_path):
        figdir = tmp_path / "figs"
        result = invoke(
            "uniformize",
            "--input", str(fixture_path("genus2_hyperbolic")),
            "--target-k", "zero",
            "--figures", str(figdir),
        )
        assert result.exit_code == 0
        assert (figdir / "solve_trace.png").stat().st_size > 0


class TestConvertUf:
    def test_alpha_zero_identity(self):
        result = invoke(
            "convert-uf", "--input", str(fixture_path("torus_hyperbolic"))
        )
        body = json.loads(result.output)
        assert body["roundtrip_max_error"] < 1e-12
        for v in body["vertices"]:
            assert v["u"] == v["f"]

    def test_packing_transform(self):
        result = invoke(
            "convert-uf", "--input", str(fixture_path("tetrahedron_hyperbolic"))
        )
        body = json.loads(result.output)
        assert body["roundtrip_max_error"] < 1e-12
        expected = -math.log(1.0 + math.sqrt(2.0))
        for v in body["vertices"]:
            assert v["u"] == pytest.approx(expected, abs=1e-14)

    def test_output_file(self, tmp_path):
        out = tmp_path / "uf.json"
        result = invoke(
            "convert-uf",
            "--input", str(fixture_path("torus_euclidean")),
            "--output", str(out),
        )
        assert result.exit_code == 0
        assert json.loads(out.read_text(encoding="utf-8"))["command"] == "convert-uf"
