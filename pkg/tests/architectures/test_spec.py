import pytest


def test_registry():
    from dcunet import build, exceptions, get_builder
    from dcunet.architectures import AVAILABLE_ARCHITECTURES

    for name in AVAILABLE_ARCHITECTURES:
        assert build(name).name == name
        assert get_builder(name)().export() == build(name).export()

    with pytest.raises(exceptions.InvalidArgumentsError) as exc:
        get_builder("segnet")
    assert "segnet" in str(exc.value)


def block_names(spec):
    return [block.name for block in spec.blocks]


def test_dcunet_blocks():
    from dcunet import build

    spec = build("dcunet")

    assert block_names(spec) == [
        "block1", "respath1", "pool1",
        "block2", "respath2", "pool2",
        "block3", "respath3", "pool3",
        "block4", "respath4", "pool4",
        "block5",
        "up6", "block6", "up7", "block7", "up8", "block8", "up9", "block9",
        "head",
    ]  # fmt: skip

    assert spec.block("block1").filters == (8, 17, 26)
    assert spec.block("block5").filters == (142, 284, 427)
    assert spec.block("block6").filters == (71, 142, 213)
    assert spec.block("block9").filters == (8, 17, 26)
    assert spec.block("block1").kind == "dual_channel"

    assert [spec.block(f"respath{i}").units for i in range(1, 5)] == [4, 3, 2, 1]
    assert [spec.block(f"respath{i}").filters for i in range(1, 5)] == [
        (32,), (64,), (128,), (256,)
    ]
    assert spec.block("up6").filters == (256,)
    assert spec.block("up9").filters == (32,)


def test_dual_channel_block_layout():
    from dcunet import build

    spec = build("dcunet")
    convs = [layer for layer in spec.layers_under("block1") if layer.kind == "conv2d"]

    assert [layer.path for layer in convs] == [
        "block1/left/conv1/conv",
        "block1/left/conv2/conv",
        "block1/left/conv3/conv",
        "block1/right/conv1/conv",
        "block1/right/conv2/conv",
        "block1/right/conv3/conv",
    ]
    assert all(layer.kernel == (3, 3) for layer in convs)
    assert [layer.filters for layer in convs] == [8, 17, 26] * 2

    # the two chains start from the block input
    assert spec.layer("block1/left/conv1/conv").inputs == ("input",)
    assert spec.layer("block1/right/conv1/conv").inputs == ("input",)
    assert spec.layer("block1/add").inputs == ("block1/left/bn", "block1/right/bn")


def test_multires_blocks():
    from dcunet import build

    spec = build("multires")

    assert spec.block("block1").kind == "multires"
    assert spec.block("block1").filters == (17, 35, 53, 105)
    assert spec.block("block5").filters == (285, 569, 855, 1709)

    shortcut = spec.layer("block1/shortcut/conv")
    assert shortcut.kernel == (1, 1)
    assert shortcut.filters == 105
    assert shortcut.role == "residual"
    # residual units have no activation
    assert "block1/shortcut/relu" not in [layer.path for layer in spec.layers]


def test_unet_blocks():
    from dcunet import build

    spec = build("unet")

    assert "respath1" not in block_names(spec)
    assert spec.block("block1").filters == (64, 64)
    assert spec.block("block5").filters == (1024, 1024)
    assert spec.layer("prehead/conv").filters == 2
    assert spec.layer("head/conv").filters == 1
    assert spec.layer("head/sigmoid").kind == "sigmoid"
    assert spec.output == "head/sigmoid"


def test_skip_connections():
    from dcunet import build

    dcunet = build("dcunet")
    assert dcunet.layer("up6/concat").inputs == ("up6/conv_transpose", "respath4/unit1/bn")
    assert dcunet.layer("up9/concat").inputs == ("up9/conv_transpose", "respath1/unit4/bn")

    unet = build("unet")
    assert unet.layer("up9/concat").inputs[1] == "block1/conv2/relu"


@pytest.mark.parametrize(
    "name,kwargs",
    [
        ("unet", dict(base_filters=(64, 128, 256, 512))),
        ("unet", dict(base_filters=(0, 128, 256, 512, 1024))),
        ("dcunet", dict(base_U=(32, 64, 128, 256))),
        ("dcunet", dict(in_channels=0)),
        ("multires", dict(base_U=(4, 64, 128, 256, 512))),
    ],
)
def test_build_invalid(name, kwargs):
    from dcunet import build, exceptions

    with pytest.raises(exceptions.InvalidArgumentsError):
        build(name, **kwargs)


def test_infer_shapes():
    from dcunet import build
    from dcunet.architectures.spec import infer_shapes

    spec = build("dcunet")
    shapes = infer_shapes(spec, (2, 1, 256, 128))

    assert shapes[spec.output] == (2, 1, 256, 128)
    assert shapes["block1/add"] == (2, 51, 256, 128)
    assert shapes["pool4"] == (2, 426, 16, 8)
    assert shapes["block5/bn"] == (2, 853, 16, 8)
    assert shapes["up6/concat"] == (2, 256 + 256, 32, 16)


@pytest.mark.parametrize("shape", [(1, 1, 250, 130), (1, 1, 0, 16), (1, 3, 256, 128), (1, 256, 128)])
def test_infer_shapes_invalid(shape):
    from dcunet import build, exceptions
    from dcunet.architectures.spec import infer_shapes

    with pytest.raises(exceptions.ShapeMismatchError):
        infer_shapes(build("dcunet"), shape)


def test_in_channels():
    from dcunet import build
    from dcunet.architectures.spec import infer_shapes

    spec = build("multires", in_channels=3)
    assert infer_shapes(spec, (1, 3, 16, 16))[spec.output] == (1, 1, 16, 16)


def test_export_deterministic():
    from dcunet import build

    text = build("dcunet").export()
    assert text == build("dcunet").export()

    lines = text.splitlines()
    assert lines[0] == (
        "# dcunet in_channels=1 output=head/sigmoid "
        "convention=nobias/bn=trainable+moving/both/noscale"
    )
    assert len(lines) == len(build("dcunet")) + 1
    assert (
        "block1/left/conv1/conv conv2d kernel=3x3 stride=1 padding=same filters=8 bias=0 "
        "inputs=input"
    ) in lines
    assert (
        "up6/conv_transpose conv_transpose2d kernel=2x2 stride=2 filters=256 bias=1 "
        "role=upsample inputs=block5/bn"
    ) in lines


def test_rebuild():
    from dcunet import build
    from dcunet.architectures.spec import REFERENCE_CONVENTION, CountConvention

    spec = build("dcunet", base_U=(6, 6, 6, 6, 6))
    assert spec.rebuild(REFERENCE_CONVENTION) is spec

    biased = spec.rebuild(CountConvention(conv_bias=True))
    assert biased.layer("block1/left/conv1/conv").bias
    assert biased.block("block1").filters == spec.block("block1").filters

    plain = spec.rebuild(CountConvention(bn_counting="none"))
    assert not [layer for layer in plain.layers if layer.kind == "batchnorm"]


def test_convention():
    from dcunet import exceptions
    from dcunet.architectures.spec import REFERENCE_CONVENTION, CountConvention

    assert REFERENCE_CONVENTION.bn_per_conv and REFERENCE_CONVENTION.bn_per_block
    assert REFERENCE_CONVENTION.counts_moving_statistics
    assert not REFERENCE_CONVENTION.conv_bias

    per_block = CountConvention(bn_counting="trainable", bn_placement="per_block")
    assert not per_block.bn_per_conv and per_block.bn_per_block
    assert not per_block.counts_moving_statistics

    assert CountConvention(True, "none").label == "bias/bn=none"
    assert not CountConvention(True, "none").bn_per_block

    with pytest.raises(exceptions.InvalidArgumentsError):
        CountConvention(bn_counting="all")

    with pytest.raises(exceptions.InvalidArgumentsError):
        CountConvention(bn_placement="after_relu")


def test_graph_validation():
    from dcunet import exceptions
    from dcunet.architectures.spec import GraphSpec, LayerSpec

    relu = LayerSpec("a", "relu", ("input",))

    with pytest.raises(exceptions.InvalidArgumentsError):
        GraphSpec("g", 1, (relu, relu))

    with pytest.raises(exceptions.InvalidArgumentsError):
        GraphSpec("g", 1, (LayerSpec("b", "relu", ("a",)),))

    with pytest.raises(exceptions.InvalidArgumentsError):
        GraphSpec("g", 1, (relu,), output="b")

    with pytest.raises(exceptions.InvalidArgumentsError):
        LayerSpec("c", "dropout", ("input",))

    with pytest.raises(exceptions.InvalidArgumentsError):
        LayerSpec("c", "conv2d", ("input",), filters=4)

    spec = GraphSpec("g", 1, (relu,), output="a")
    assert len(spec) == 1
    with pytest.raises(KeyError):
        spec.layer("b")
    with pytest.raises(KeyError):
        spec.block("b")


def test_hand_made_graph_rebuild():
    from dcunet.architectures.counting import count_params
    from dcunet.architectures.spec import CountConvention, GraphSpec, LayerSpec

    spec = GraphSpec(
        "custom",
        1,
        (
            LayerSpec("conv", "conv2d", ("input",), kernel=(3, 3), filters=4),
            LayerSpec("bn", "batchnorm", ("conv",), scale=True),
        ),
        output="bn",
    )

    assert count_params(spec).total == 3 * 3 * 4 + 4 * 4
    trainable_only = count_params(spec, CountConvention(bn_counting="trainable"))
    assert trainable_only.total == 3 * 3 * 4 + 2 * 4
