from click.testing import CliRunner


def test_synth_command(tmpdir):
    from dcunet.datasets import load_manifest
    from dcunet.scripts.cli import cli

    outdir = tmpdir.join("data")
    runner = CliRunner()
    result = runner.invoke(
        cli,
        ["synth", "--count", "4", "--width", "32", "--height", "16", "--seed", "3"]
        + ["--groups", "2", "-o", str(outdir), "-q"],
    )
    assert result.exit_code == 0, result.output
    assert not result.output

    manifest = load_manifest(str(outdir.join("manifest.json")))
    assert len(manifest.items) == 4
    assert (manifest.width, manifest.height, manifest.depth) == (32, 16, 8)
    assert manifest.groups == ["g000", "g001", "g000", "g001"]


def test_synth_command_deterministic(tmpdir):
    from dcunet.scripts.cli import cli

    runner = CliRunner()
    for name in ("a", "b"):
        result = runner.invoke(
            cli, ["synth", "--count", "2", "--width", "16", "--height", "16", "-o", str(tmpdir.join(name))]
        )
        assert result.exit_code == 0, result.output
        assert "Wrote 2 samples" in result.output

    for filename in ("image_0001.pgm", "mask_0001.pgm"):
        first = tmpdir.join("a", filename).read_binary()
        second = tmpdir.join("b", filename).read_binary()
        assert first == second


def test_synth_command_16_bit(tmpdir):
    from dcunet.pgm import load_gray
    from dcunet.scripts.cli import cli

    outdir = tmpdir.join("deep")
    runner = CliRunner()
    result = runner.invoke(
        cli, ["synth", "--count", "1", "--width", "16", "--height", "16", "--depth", "16", "-o", str(outdir)]
    )
    assert result.exit_code == 0, result.output
    assert load_gray(str(outdir.join("image_0000.pgm"))).depth == 16


def test_synth_command_invalid(tmpdir):
    from dcunet.scripts.cli import cli

    runner = CliRunner()

    result = runner.invoke(cli, ["synth", "--width", "40", "-o", str(tmpdir)])
    assert result.exit_code == 2
    assert "multiple of 16" in result.output

    result = runner.invoke(cli, ["synth", "--count", "2", "--groups", "3", "-o", str(tmpdir)])
    assert result.exit_code == 2
    assert "cannot exceed --count" in result.output
