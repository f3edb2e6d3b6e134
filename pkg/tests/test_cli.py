import hashlib
from pathlib import Path

import numpy as np
import pytest

from statedge import io, synthetic
from statedge.cli import CSV_HEADER, main

GOLDEN = Path(__file__).parent / "data" / "golden_metrics.csv"


def _digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert main(["synth", str(root), "--n", "3", "--size", "96"]) == 0
    return root


def test_detect_single_file(tmp_path, corpus, capsys):
    src = corpus / "line_speckle.png"
    assert main(["detect", str(src), "-o", str(tmp_path)]) == 0
    out = tmp_path / "line_speckle.edges.png"
    values = set(np.unique(io.read_image(out)).tolist())
    assert values <= {0.0, 255.0}
    assert "ms" in capsys.readouterr().out


def test_detect_directory_order_and_dump(tmp_path, corpus, capsys):
    assert main(["detect", str(corpus / "images"), "-o", str(tmp_path), "--dump-gradient"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if "edge pixels" in l]
    assert [Path(l.split(":")[0]).name for l in lines] == [f"synth_{i:02d}.png" for i in range(3)]
    for i in range(3):
        stem = f"synth_{i:02d}"
        for suffix in (".edges.png", ".gradient.png", ".membership.png", ".gradient.npy",
                       ".membership.npy"):
            assert (tmp_path / (stem + suffix)).exists()
    memb = np.load(tmp_path / "synth_00.membership.npy")
    assert memb.shape == (96, 96) and 0 <= memb.min() and memb.max() <= 1


def test_detect_corrupt_file(tmp_path, corpus, capsys):
    src = tmp_path / "in"
    src.mkdir()
    for p in (corpus / "images").iterdir():
        (src / p.name).write_bytes(p.read_bytes())
    (src / "broken.png").write_bytes(b"not a png")
    out = tmp_path / "out"
    assert main(["detect", str(src), "-o", str(out)]) == 1
    assert "broken.png" in capsys.readouterr().err
    assert len(list(out.glob("*.edges.png"))) == 3


def test_detect_missing_input(tmp_path):
    assert main(["detect", str(tmp_path / "nope.png"), "-o", str(tmp_path)]) == 1


def _read_csv(path):
    return [l.split(",") for l in Path(path).read_text().splitlines()]


def test_evaluate_identity(tmp_path, corpus, capsys):
    out = tmp_path / "m"
    gt = str(corpus / "gt")
    assert main(["evaluate", "--pred", gt, "--gt", gt, "-o", str(out)]) == 0
    rows = _read_csv(out / "metrics.csv")
    assert rows[0] == CSV_HEADER
    body, mean = rows[1:-1], rows[-1]
    assert len(body) == 3 and mean[0] == "MEAN"
    for r in body:
        assert r[1] == "0" and r[3] == "inf" and r[6] == "1"
    assert mean[6] == "1" and mean[3] == "inf"
    assert "mean_f=1" in capsys.readouterr().out


def test_evaluate_empty_gt(tmp_path, corpus):
    empty = tmp_path / "gt"
    empty.mkdir()
    out = tmp_path / "m"
    assert main(["evaluate", "--input", str(corpus / "images"), "--gt", str(empty), "-o", str(out)]) == 1
    assert not (out / "metrics.csv").exists()


def test_evaluate_ten_images(tmp_path):
    root = tmp_path / "c"
    assert main(["synth", str(root), "--n", "10", "--size", "64"]) == 0
    out = tmp_path / "m"
    assert main(["evaluate", "--input", str(root / "images"), "--gt", str(root / "gt"),
                 "-o", str(out)]) == 0
    rows = _read_csv(out / "metrics.csv")
    assert len(rows) == 12
    assert all(float(r[7]) >= 0 for r in rows[1:])


def test_evaluate_skips_unpaired(tmp_path, corpus, capsys):
    gt = tmp_path / "gt"
    gt.mkdir()
    (gt / "synth_00.png").write_bytes((corpus / "gt" / "synth_00.png").read_bytes())
    out = tmp_path / "m"
    assert main(["evaluate", "--input", str(corpus / "images"), "--gt", str(gt), "-o", str(out)]) == 0
    assert len(_read_csv(out / "metrics.csv")) == 3
    assert "no ground truth" in capsys.readouterr().err


def test_multi_annotator_majority(tmp_path):
    gt = tmp_path / "gt" / "img"
    gt.mkdir(parents=True)
    maps = [np.zeros((4, 4), bool) for _ in range(3)]
    maps[0][0, 0] = maps[1][0, 0] = True
    maps[2][3, 3] = True
    for i, m in enumerate(maps):
        io.write_edge_map(gt / f"a{i}.png", m)
    from statedge.cli import load_ground_truth
    fused = load_ground_truth(tmp_path / "gt")["img"]
    assert fused[0, 0] and fused.sum() == 1


def test_golden_csv(tmp_path, corpus):
    out = tmp_path / "m"
    assert main(["evaluate", "--input", str(corpus / "images"), "--gt", str(corpus / "gt"),
                 "-o", str(out), "--no-timing"]) == 0
    assert (out / "metrics.csv").read_text() == GOLDEN.read_text()


def test_compare(tmp_path, corpus, capsys):
    args = ["compare", str(corpus / "images"), str(corpus / "gt"), "--no-timing"]
    assert main(args + ["-o", str(tmp_path / "a")]) == 0
    assert main(args + ["-o", str(tmp_path / "b")]) == 0
    text = (tmp_path / "a" / "compare.csv").read_text()
    assert text == (tmp_path / "b" / "compare.csv").read_text()
    for name in ("edd-mait", "edd-mait-fixed", "sobel-otsu", "otsu-binarize"):
        assert f"# method: {name}\n" in text
    ranking = text.split("# ranking\n")[1].splitlines()[1:]
    scores = {r.split(",")[1]: float(r.split(",")[2]) for r in ranking}
    assert [float(r.split(",")[2]) for r in ranking] == sorted(scores.values(), reverse=True)
    assert scores["edd-mait"] > scores["otsu-binarize"]


def test_noise(tmp_path, corpus):
    src = corpus / "line_speckle.png"
    zero = tmp_path / "zero.png"
    assert main(["noise", str(src), "--sigma", "0", "-o", str(zero)]) == 0
    assert np.array_equal(io.read_image(zero), io.read_image(src))
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert main(["noise", str(src), "--sigma", "15", "--seed", "7", "-o", str(a)]) == 0
    assert main(["noise", str(src), "--sigma", "15", "--seed", "7", "-o", str(b)]) == 0
    assert _digest(a) == _digest(b)
    out = tmp_path / "det"
    assert main(["detect", str(a), "-o", str(out)]) == 0
    fx = synthetic.line_speckle(seed=0)
    edges = io.read_edge_map(out / "a.edges.png")
    assert edges[fx.line].mean() >= 0.85


def test_noise_bad_sigma(tmp_path, corpus):
    with pytest.raises(SystemExit) as exc:
        main(["noise", str(corpus / "line_speckle.png"), "--sigma", "-1", "-o", str(tmp_path / "x.png")])
    assert exc.value.code == 2


def test_stat(capsys):
    assert main(["stat", "--table", "83,0,89,10"]) == 0
    out = capsys.readouterr().out
    assert "fisher_exact" in out and "reject H0" in out and "0.00182346" in out
    assert main(["stat", "--table", "21,24,21,15"]) == 0
    out = capsys.readouterr().out
    assert "chi_square" in out and "accept H0" in out and "1.09038" in out
    assert main(["stat", "--table", "1,2,3"]) == 1


def test_otsu(tmp_path, capsys):
    img = np.zeros((10, 10))
    img[:, 5:] = 200
    path = tmp_path / "i.png"
    io.write_image(path, img)
    assert main(["otsu", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "T*=0 T_L=0 T_H=0"
    assert main(["otsu", str(path), "--dual-ratio", "0.25"]) == 0


def test_config_file_and_flag_precedence(tmp_path, corpus):
    from statedge.cli import build_config, make_parser
    conf = tmp_path / "c.cfg"
    conf.write_text("# comment\nalpha = 0.01\nwmin = 16\nno-attention = true\n"
                    "attention-kernel = 0,1,0,1,-4,1,0,1,0\nattention-pool = 4\n")
    args = make_parser().parse_args(["detect", "x", "--config", str(conf), "--alpha", "0.2"])
    cfg, tol = build_config(args)
    assert cfg.alpha == 0.2 and cfg.wmin == 16 and not cfg.attention_enabled and tol == 2
    assert cfg.attention_cfg.pool_size == 4
    conf.write_text("bogus = 1\n")
    assert main(["detect", str(corpus / "line_speckle.png"), "-o", str(tmp_path), "--config", str(conf)]) == 1


def test_threads_env(monkeypatch):
    from statedge.cli import build_config, make_parser
    monkeypatch.setenv("STATEDGE_THREADS", "4")
    cfg, _ = build_config(make_parser().parse_args(["detect", "x"]))
    assert cfg.threads == 4
    cfg, _ = build_config(make_parser().parse_args(["detect", "x", "--threads", "2"]))
    assert cfg.threads == 2
