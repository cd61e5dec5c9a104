from click.testing import CliRunner


def test_summarize_table():
    from dcunet.scripts.cli import cli

    runner = CliRunner()
    result = runner.invoke(cli, ["summarize", "--arch", "dcunet", "--input-size", "64x32"])
    assert result.exit_code == 0

    lines = result.output.splitlines()
    assert lines[0].startswith("# dcunet  convention=")
    assert "total_params=10069640" in lines[0]
    assert lines[-1].split()[0] == "head/sigmoid"
    assert lines[-1].split()[-1] == "1x1x64x32"


def test_summarize_default_size():
    from dcunet.scripts.cli import cli

    runner = CliRunner()
    result = runner.invoke(
        cli, ["summarize", "--arch", "unet", "--base-filters", "4,8,16,32,64"]
    )
    assert result.exit_code == 0
    assert result.output.splitlines()[-1].split()[-1] == "1x1x256x128"


def test_summarize_export():
    from dcunet import build
    from dcunet.scripts.cli import cli

    runner = CliRunner()
    result = runner.invoke(
        cli, ["summarize", "--arch", "multires", "--alpha", "1.0", "--export"]
    )
    assert result.exit_code == 0
    assert result.output == build("multires", alpha=1.0).export()


def test_summarize_invalid():
    from dcunet.scripts.cli import cli

    runner = CliRunner()

    result = runner.invoke(cli, ["summarize", "--arch", "dcunet", "--input-size", "40x32"])
    assert result.exit_code == 2
    assert "--input-size" in result.output

    result = runner.invoke(cli, ["summarize", "--arch", "dcunet", "--input-size", "big"])
    assert result.exit_code == 2
    assert "HEIGHTxWIDTH" in result.output

    result = runner.invoke(cli, ["summarize", "--arch", "unet", "--alpha", "2"])
    assert result.exit_code == 2
    assert "--alpha does not apply to unet" in result.output

    result = runner.invoke(cli, ["summarize", "--arch", "dcunet", "--base-filters", "8,8"])
    assert result.exit_code == 2
    assert "5 entries" in result.output


def test_summarize_bn_scale():
    from dcunet import build
    from dcunet.architectures.spec import CountConvention
    from dcunet.scripts.cli import cli

    runner = CliRunner()
    result = runner.invoke(
        cli, ["summarize", "--arch", "dcunet", "--base-filters", "8,16,32,64,128", "--bn-scale", "--export"]
    )
    assert result.exit_code == 0

    expected = build("dcunet", base_U=(8, 16, 32, 64, 128), convention=CountConvention(bn_scale=True))
    assert result.output == expected.export()
    assert result.output != build("dcunet", base_U=(8, 16, 32, 64, 128)).export()
