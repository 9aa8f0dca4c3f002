import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from annealed_ldp.cli.io import read_table
from annealed_ldp.cli.validation import Check
from annealed_ldp.oracle.brute_force import brute_force_log_partition
from annealed_ldp.oracle.enumeration import ExactInstance

TWO_TYPE = ["--atoms", "1,3", "--probs", "0.5,0.5"]


class CommandTestCase(SimpleTestCase):
    """Run a command into a temporary file and read the table back."""

    def setUp(self):
        workdir = tempfile.TemporaryDirectory()
        self.addCleanup(workdir.cleanup)
        self.workdir = Path(workdir.name)

    def run_command(self, name, *args, suffix="csv"):
        path = self.workdir / f"{name}.{suffix}"
        out = StringIO()
        call_command(name, *args, "--output", str(path), stdout=out)
        self.assertIn(f"to {path}", out.getvalue())
        return read_table(path)


class PhaseCommandTestCase(CommandTestCase):
    def test_columns_and_rows(self):
        metadata, frame = self.run_command("phase", *TWO_TYPE, "--beta", "0:1:0.05", "--B", "0.1")
        self.assertEqual(
            list(frame.columns),
            ["beta", "B", "z_star", "psi_an", "magnetization", "susceptibility", "beta_c"],
        )
        self.assertEqual(len(frame), 21)
        self.assertEqual(metadata["command"], "phase")
        self.assertEqual(metadata["tool"], "annealed-ldp")
        self.assertIn("generated_at", metadata)
        self.assertAlmostEqual(frame["beta_c"].iloc[0], math.asinh(0.4), places=12)

    def test_free_spins_row(self):
        _, frame = self.run_command("phase", *TWO_TYPE, "--beta", "0", "--B", "0.1")
        row = frame.iloc[0]
        self.assertAlmostEqual(row["psi_an"], math.log(2 * math.cosh(0.1)), places=12)
        self.assertAlmostEqual(row["magnetization"], math.tanh(0.1), places=12)

    def test_magnetization_grows_with_beta(self):
        _, frame = self.run_command("phase", *TWO_TYPE, "--beta", "0.2,0.5,0.8", "--B", "0.1")
        self.assertTrue(frame["magnetization"].is_monotonic_increasing)

    def test_counts_define_the_model(self):
        metadata, _ = self.run_command("phase", "--atoms", "1,3", "--counts", "3,1", "--beta", "0.5", "--B", "0")
        self.assertEqual(metadata["probs"], "0.75,0.25")

    def test_deterministic_output_is_identical(self):
        outputs = []
        for _ in range(2):
            out = StringIO()
            call_command("phase", *TWO_TYPE, "--beta", "0.5,0.9", "--B", "0", "--deterministic", stdout=out)
            outputs.append(out.getvalue())
        self.assertEqual(outputs[0], outputs[1])
        self.assertNotIn("generated_at", outputs[0])
        self.assertTrue(outputs[0].startswith("# tool=annealed-ldp\n"))

    def test_json_output(self):
        metadata, frame = self.run_command(
            "phase", *TWO_TYPE, "--beta", "0.5", "--B", "0", "--format", "json", suffix="json"
        )
        self.assertEqual(metadata["command"], "phase")
        self.assertEqual(frame.shape, (1, 7))

    def test_config_file_and_flag_precedence(self):
        config = self.workdir / "run.env"
        config.write_text("atoms=1,3\nprobs=0.5,0.5\nbeta=0.2\nB=0.3\ndeterministic=true\n")
        metadata, frame = self.run_command("phase", "--config", str(config), "--B", "0.1")
        self.assertEqual(frame[["beta", "B"]].values.tolist(), [[0.2, 0.1]])
        self.assertNotIn("generated_at", metadata)

    def test_missing_config_file(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("phase", "--config", str(self.workdir / "missing.env"), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_usage_errors(self):
        bad_invocations = [
            ["--beta", "0.5", "--B", "0"],
            [*TWO_TYPE, "--B", "0"],
            [*TWO_TYPE, "--beta", "0:1", "--B", "0"],
            [*TWO_TYPE, "--beta=-0.5", "--B", "0"],
            ["--atoms", "3,1", "--probs", "0.5,0.5", "--beta", "0.5", "--B", "0"],
            [*TWO_TYPE, "--beta", "0.5", "--B", "0", "--output", str(self.workdir / "no" / "out.csv")],
        ]
        for args in bad_invocations:
            with self.subTest(args=args), self.assertRaises(CommandError) as ctx:
                call_command("phase", *args, stdout=StringIO())
            self.assertEqual(ctx.exception.returncode, 2)


class RateCommandsTestCase(CommandTestCase):
    def test_one_value_column_per_method(self):
        grid = ["--beta", "0.8", "--B", "0", "--m", "-0.9:0.9:0.3"]
        _, frame = self.run_command("rate_spin", *TWO_TYPE, *grid, "--method", "contraction,combinatorial")
        self.assertEqual(list(frame.columns), ["beta", "B", "m", "contraction", "combinatorial"])
        self.assertEqual(len(frame), 7)
        self.assertLessEqual((frame["contraction"] - frame["combinatorial"]).abs().max(), 1e-6)

    def test_legendre_method_flags_flat_piece(self):
        _, frame = self.run_command(
            "rate_spin", *TWO_TYPE, "--beta", "0.8", "--B", "0", "--m", "0", "--method", "highT_legendre"
        )
        self.assertEqual(list(frame.columns), ["beta", "B", "m", "highT_legendre", "non_exposed"])
        self.assertTrue(bool(frame["non_exposed"].iloc[0]))

    def test_unknown_method(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "rate_spin", *TWO_TYPE, "--beta", "0.8", "--B", "0", "--m", "0", "--method", "saddle", stdout=StringIO()
            )
        self.assertEqual(ctx.exception.returncode, 2)

    def test_edge_cgf_table(self):
        _, frame = self.run_command("rate_edges", *TWO_TYPE, "--beta", "0.8", "--B", "0.1", "--t", "-1:1:0.5")
        self.assertEqual(list(frame.columns), ["beta", "B", "t", "phi", "phi_prime", "z_star_t"])
        self.assertLessEqual(abs(frame["phi"].iloc[2]), 1e-12)
        self.assertTrue(frame["phi"].is_monotonic_increasing)

    def test_edge_rate_vanishes_at_typical_density(self):
        _, cgf = self.run_command("rate_edges", *TWO_TYPE, "--beta", "0.8", "--B", "0.1", "--t", "0")
        typical = cgf["phi_prime"].iloc[0]
        _, frame = self.run_command("rate_edges", *TWO_TYPE, "--beta", "0.8", "--B", "0.1", "--y", repr(float(typical)))
        self.assertLessEqual(abs(frame["rate"].iloc[0]), 1e-10)
        self.assertAlmostEqual(frame["typical_density"].iloc[0], typical, places=10)

    def test_edges_need_exactly_one_grid(self):
        for extra in ([], ["--t", "0", "--y", "1"]):
            with self.subTest(extra=extra), self.assertRaises(CommandError) as ctx:
                call_command("rate_edges", *TWO_TYPE, "--beta", "0.8", "--B", "0", *extra, stdout=StringIO())
            self.assertEqual(ctx.exception.returncode, 2)


class DegreeAndOracleCommandsTestCase(CommandTestCase):
    def test_mixture_reproduces_mgf(self):
        _, frame = self.run_command("degrees", *TWO_TYPE, "--beta", "0.8", "--B", "0.1", "--w", "1,3", "--t", "-1,0.5")
        self.assertEqual(len(frame), 4)
        self.assertLessEqual((frame["mgf"] - frame["mixture_mgf"]).abs().max(), 1e-10)

    def test_pmf_sums_to_one(self):
        _, frame = self.run_command("degrees", *TWO_TYPE, "--beta", "0.8", "--B", "0.1", "--w", "3", "--d", "0:150:1")
        self.assertEqual(frame["d"].tolist(), list(range(151)))
        self.assertAlmostEqual(frame["pmf"].sum(), 1.0, places=9)

    def test_exact_partition(self):
        _, frame = self.run_command(
            "oracle", "--atoms", "1,3", "--counts", "3,4", "--beta", "0.8", "--B", "0.1", "--quantity", "partition"
        )
        inst = ExactInstance((3, 4), (1.0, 3.0), 0.8, 0.1)
        expected = brute_force_log_partition(inst.weight_sequence, 0.8, 0.1)
        self.assertEqual(list(frame.columns), ["beta", "B", "n", "log_partition", "pressure"])
        self.assertAlmostEqual(frame["log_partition"].iloc[0] / expected, 1.0, places=10)

    def test_exact_spin_law(self):
        _, frame = self.run_command(
            "oracle", "--atoms", "1,3", "--counts", "3,4", "--beta", "0.8", "--B", "0,0.5", "--quantity", "spin"
        )
        self.assertEqual(len(frame), 16)
        for _, law in frame.groupby("B"):
            self.assertAlmostEqual(law["probability"].sum(), 1.0, places=12)

    def test_exact_degree_mgf(self):
        instance = ["--atoms", "1,3", "--counts", "5,5", "--beta", "0.8", "--B", "0.1"]
        _, frame = self.run_command("oracle", *instance, "--quantity", "degree", "--type", "1", "--t", "0,0.5")
        self.assertEqual(frame["mgf"].iloc[0], 1.0)
        self.assertGreater(frame["mgf"].iloc[1], 1.0)
        self.assertEqual(frame["w"].iloc[0], 3.0)

    def test_oracle_requires_counts(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("oracle", *TWO_TYPE, "--beta", "0.8", "--B", "0", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_oracle_resource_limit(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "oracle", "--atoms", "1,2,3,4,5", "--counts", "1,1,1,1,1", "--beta", "0.8", "--B", "0", stdout=StringIO()
            )
        self.assertEqual(ctx.exception.returncode, 2)


class MonteCarloCommandTestCase(CommandTestCase):
    ARGS = ("--atoms", "1,3", "--counts", "50,50", "--theta", "0", "--B", "0.5", "--sweeps", "400", "--burn-in", "50")

    def test_single_run(self):
        metadata, frame = self.run_command("mc", *self.ARGS, "--seed", "3")
        self.assertEqual(metadata["rng"], "Philox")
        self.assertEqual(metadata["seed"], 3)
        self.assertEqual(frame["seed"].tolist(), [3])
        self.assertEqual(frame["samples_used"].iloc[0], 350)
        self.assertAlmostEqual(frame["limit_magnetization"].iloc[0], math.tanh(0.5), places=12)

    def test_seeds_fan_out_in_order(self):
        _, frame = self.run_command("mc", *self.ARGS, "--seeds", "5,1")
        self.assertEqual(frame["seed"].tolist(), [5, 1])

    def test_beta_or_theta(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("mc", *self.ARGS, "--beta", "0.5", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


class ValidateCommandTestCase(SimpleTestCase):
    def checks(self, *passed):
        return [Check(i + 1, f"check {i + 1}", ok, "detail", 0.0) for i, ok in enumerate(passed)]

    def test_all_checks_pass(self):
        out = StringIO()
        with patch("annealed_ldp.cli.management.commands.validate.run_suite", return_value=self.checks(True, True)):
            call_command("validate", "--deterministic", stdout=out)
        output = out.getvalue()
        self.assertIn("# suite=quick", output)
        self.assertEqual(output.count("PASS"), 2)

    def test_failure_sets_exit_status(self):
        out = StringIO()
        with (
            patch("annealed_ldp.cli.management.commands.validate.run_suite", return_value=self.checks(True, False)),
            self.assertRaises(CommandError) as ctx,
        ):
            call_command("validate", "--suite", "acceptance", stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("FAIL", out.getvalue())
        self.assertIn("2 (check 2)", str(ctx.exception))

    @pytest.mark.slow
    def test_quick_suite_passes(self):
        out = StringIO()
        call_command("validate", "--suite", "quick", stdout=out)
        self.assertEqual(out.getvalue().count("PASS"), 10)
