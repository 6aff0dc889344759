import json

import jsonschema
import pytest

from haantjes import cli
from haantjes.bundle import BundleError, builtin_names, bundle_from_dict, load_bundle, loads_bundle
from haantjes.reports import REPORT_SCHEMA

from conftest import U3, magri_data

SHIPPED = {"magri_r3", "magri_r3_k3", "gelfand_dickey", "wdvv_n3_golden", "stackel_2dof", "so3_poisson"}


def write(tmp_path, data, name="b.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestLoad:
    def test_builtin_names(self):
        assert SHIPPED <= set(builtin_names())

    def test_magri_fixture(self):
        b = load_bundle("magri_r3")
        K, K2, theta, X = magri_data()
        assert b.chart == U3
        assert b.tensor("K") == K and b.tensor("K2") == K2
        assert b.one_form("theta") == theta and b.vector_field("X") == X
        assert b.tensor("Id").is_identity()

    def test_chart_only(self):
        b = bundle_from_dict({"chart": ["x", "y"]})
        assert b.chart.names == ("x", "y") and b.tensors == {}

    def test_load_from_path(self, tmp_path):
        path = write(tmp_path, {"chart": ["x"], "scalars": {"f": "x^2 + 1"}})
        assert str(load_bundle(path).scalar("f")) == "x^2 + 1"

    def test_shape_mismatch(self):
        with pytest.raises(BundleError) as info:
            bundle_from_dict({"chart": ["u1", "u2", "u3"], "tensors": {"K": [["0", "1", "0"], ["1", "0", "0"]]}})
        assert info.value.pointer == "/tensors/K"

    def test_row_length_mismatch(self):
        with pytest.raises(BundleError) as info:
            bundle_from_dict({"chart": ["x", "y"], "one_forms": {"t": ["x"]}})
        assert info.value.pointer.startswith("/one_forms/t")

    def test_schema_violation_pointer(self):
        with pytest.raises(BundleError) as info:
            bundle_from_dict({"chart": ["x"], "tensors": {"K": [[True]]}})
        assert info.value.pointer == "/tensors/K/0/0"
        with pytest.raises(BundleError) as info:
            bundle_from_dict({"chart": ["x"], "extra": 1})
        assert "schema" in str(info.value)

    def test_missing_chart(self):
        with pytest.raises(BundleError):
            bundle_from_dict({"tensors": {}})

    def test_parse_error_has_pointer_and_position(self):
        with pytest.raises(BundleError) as info:
            bundle_from_dict({"chart": ["x", "y"], "scalars": {"f": "x + * y"}})
        assert info.value.pointer == "/scalars/f"
        assert "4" in str(info.value) or "position" in str(info.value)

    def test_unknown_variable(self):
        with pytest.raises(BundleError) as info:
            bundle_from_dict({"chart": ["x"], "scalars": {"f": "z"}})
        assert info.value.pointer == "/scalars/f"

    def test_dangling_reference(self):
        data = {
            "chart": ["x"],
            "tensors": {"K": [["x"]]},
            "one_forms": {"t": ["1"]},
            "specs": {"magri_lenard": {"operators": ["Id"], "theta": "t", "seed": "X"}},
        }
        with pytest.raises(BundleError) as info:
            bundle_from_dict(data)
        assert info.value.pointer == "/specs/magri_lenard/seed"

    def test_reserved_identity(self):
        with pytest.raises(BundleError):
            bundle_from_dict({"chart": ["x"], "tensors": {"Id": [["2"]]}})

    def test_missing_accessors(self):
        b = load_bundle("gelfand_dickey")
        for getter in (b.tensor, b.one_form, b.vector_field, b.scalar, b.spec):
            with pytest.raises(BundleError):
                getter("nope")

    @pytest.mark.parametrize("name", sorted(builtin_names()))
    def test_round_trip(self, name):
        b = load_bundle(name)
        again = loads_bundle(b.dumps())
        assert again == b
        assert again.dumps() == b.dumps()

    def test_canonicalised(self):
        b = bundle_from_dict({"chart": ["x", "y"], "scalars": {"f": "y*x + x*y - (x)"}})
        assert str(b.scalar("f")) == "2*x*y - x"


def run(*argv):
    return cli.run(list(argv))


class TestCLI:
    def test_haantjes_of_k(self):
        code, out, _ = run("haantjes", "--bundle", "magri_r3", "--tensor", "K")
        assert (code, out) == (0, "H = 0")

    def test_verify_ml(self):
        code, out, _ = run("verify", "ml", "--bundle", "magri_r3")
        assert code == 0
        for group in "ABCD":
            assert f"[PASS] {group} " in out
        assert out.endswith("overall: PASS")

    def test_verify_ml_cubic(self):
        code, out, _ = run("verify", "ml", "--bundle", "magri_r3_k3")
        assert code == 1
        assert "[FAIL] C " in out
        assert "witness theta R_k R_l at (1,3): [-2*u2, -4*u1, 0]" in out

    def test_witness_reparses(self):
        code, out, _ = run("verify", "ml", "--bundle", "magri_r3_k3", "--json")
        payload = json.loads(out)
        check = next(c for c in payload["checks"] if c["id"] == "C")
        assert [U3.parse(x) for x in check["witness"]["value"]] == [U3.parse("-2*u2"), U3.parse("-4*u1"), U3.zero()]

    def test_torsion(self):
        code, out, _ = run("torsion", "--bundle", "gelfand_dickey", "--tensor", "K")
        assert code == 0
        assert out.splitlines() == ["T(e1, e2) = (0, -1, 0)", "T(e1, e3) = (0, 0, -1)"]

    def test_higher(self):
        code, out, _ = run("higher", "--bundle", "magri_r3", "--tensor", "K", "--k", "2")
        assert code == 0 and out

    def test_higher_rejects_bad_k(self):
        code, _, err = run("higher", "--bundle", "magri_r3", "--tensor", "K", "--k", "0")
        assert code == 2 and err.startswith("error:")

    def test_bracket_space(self):
        code, out, _ = run("torsion", "--bundle", "so3_poisson", "--tensor", "C", "--space", "so3")
        assert code == 0 and out.startswith("T(e1, e2) = ")
        assert run("torsion", "--bundle", "so3_poisson", "--tensor", "C", "--space", "nope")[0] == 2

    def test_diag(self):
        code, out, _ = run("diag", "--bundle", "magri_r3", "--tensor", "K")
        assert code == 0 and out.startswith("verdict: DIAGONALIZABLE")

    def test_poisson_and_compat(self):
        assert run("verify", "poisson", "--bundle", "so3_poisson", "--tensor", "P")[0] == 0
        assert run("verify", "poisson", "--bundle", "so3_poisson", "--tensor", "Q")[0] == 0
        assert run("verify", "compat", "--bundle", "so3_poisson")[0] == 0

    def test_sh_and_chain(self):
        assert run("verify", "sh", "--bundle", "stackel_2dof")[0] == 0
        code, out, _ = run("chain", "--bundle", "stackel_2dof")
        assert code == 0 and "[PASS] involution" in out
        code, out, _ = run("chain", "--bundle", "stackel_2dof_perturbed")
        assert code == 1 and "[FAIL] closed_K1" in out

    def test_stackel(self):
        code, out, _ = run("stackel", "--bundle", "stackel_2dof")
        assert code == 0 and "(1/2*q1*p2^2 + 1/2*q2*p1^2)/(q1 + q2)" in out

    def test_wdvv(self):
        assert run("wdvv", "check", "--bundle", "wdvv_n3_golden")[0] == 0
        code, out, _ = run("wdvv", "to-ml", "--bundle", "wdvv_n3_golden")
        assert code == 0 and "R2 = [[0, x3, x2], [1, 0, x3], [0, 1, 0]]" in out
        code, out, _ = run("wdvv", "from-ml", "--bundle", "wdvv_n3_golden")
        assert code == 0 and out == "F = 1/60*x3^5 + 1/4*x2^2*x3^2 + 1/2*x1^2*x3 + 1/2*x1*x2^2"

    def test_wdvv_non_flat_seed(self):
        code, out, _ = run("wdvv", "from-ml", "--bundle", "magri_r3")
        assert code == 1 and "flat_seed" in out

    def test_biham(self):
        code, out, _ = run("biham", "--bundle", "biham_r4")
        assert code == 0 and out.endswith("overall: PASS")

    def test_usage_errors(self):
        assert run("haantjes", "--bundle", "nope", "--tensor", "K")[0] == 2
        assert run("haantjes", "--bundle", "magri_r3", "--tensor", "Z")[0] == 2
        assert run("haantjes", "--bundle", "magri_r3")[0] == 2
        assert run("frobnicate")[0] == 2
        assert run()[0] == 2

    def test_bad_bundle_file(self, tmp_path):
        path = write(tmp_path, {"chart": ["u1", "u2", "u3"], "tensors": {"K": [["0", "1", "0"], ["1", "0", "0"]]}})
        code, _, err = run("haantjes", "--bundle", path, "--tensor", "K")
        assert code == 2 and "/tensors/K" in err

    @pytest.mark.parametrize(
        "argv",
        [
            ("haantjes", "--bundle", "magri_r3", "--tensor", "K"),
            ("verify", "ml", "--bundle", "magri_r3_k3"),
            ("diag", "--bundle", "magri_r3", "--tensor", "K2"),
            ("chain", "--bundle", "stackel_2dof"),
            ("verify", "compat", "--bundle", "so3_poisson"),
        ],
    )
    def test_deterministic(self, argv):
        assert run(*argv) == run(*argv)
        assert run(*argv, "--json") == run(*argv, "--json")

    @pytest.mark.parametrize(
        "argv",
        [
            ("verify", "ml", "--bundle", "magri_r3"),
            ("verify", "ml", "--bundle", "magri_r3_k3"),
            ("verify", "sh", "--bundle", "stackel_2dof"),
            ("chain", "--bundle", "stackel_2dof"),
            ("chain", "--bundle", "stackel_2dof_perturbed"),
            ("diag", "--bundle", "gelfand_dickey", "--tensor", "K"),
            ("haantjes", "--bundle", "magri_r3", "--tensor", "K2"),
            ("wdvv", "check", "--bundle", "wdvv_n3_golden"),
            ("wdvv", "from-ml", "--bundle", "magri_r3"),
            ("biham", "--bundle", "biham_r4"),
        ],
    )
    def test_json_matches_schema(self, argv):
        code, out, _ = run(*argv, "--json")
        payload = json.loads(out)
        jsonschema.validate(payload, REPORT_SCHEMA)
        assert (payload["overall"] == "pass") == (code == 0)

    def test_main_prints(self, capsys):
        assert cli.main(["haantjes", "--bundle", "magri_r3", "--tensor", "K"]) == 0
        assert capsys.readouterr().out == "H = 0\n"
