"""Rendering: every kind draws from real CLI outputs, deterministically."""

import pytest

from dynperc_reports import EmptyInputError, FigureSpec, ReportError, SchemaError, render
from dynperc_reports.figures import _render_cdf_overlay

import matplotlib.pyplot as plt


def overlay_spec(cli_runs, out, first="finite", second="limit", cmp_key="cmp"):
    return FigureSpec(
        "cdf-overlay",
        (
            cli_runs[first] / "pairings.csv",
            cli_runs[second] / "pairings.csv",
            cli_runs[cmp_key] / "distances.csv",
        ),
        out,
        "finite horizon against the limit law",
    )


def legend_texts(fig):
    texts = []
    for ax in fig.axes:
        legend = ax.get_legend()
        if legend is not None:
            texts += [t.get_text() for t in legend.get_texts()]
    return texts


def test_cdf_overlay_renders_with_caption(cli_runs, tmp_path):
    out = render(overlay_spec(cli_runs, tmp_path / "overlay.png"))
    assert out.exists()
    sidecar = (tmp_path / "overlay.png.caption.txt").read_text(encoding="utf-8")
    assert "finite horizon against the limit law" in sidecar
    assert "seed 92" in sidecar and "seed 93" in sidecar
    assert "config" in sidecar


def test_cdf_overlay_self_comparison_annotates_ks_zero(cli_runs, tmp_path):
    spec = overlay_spec(cli_runs, tmp_path / "self.png", second="finite", cmp_key="self_cmp")
    fig = _render_cdf_overlay(spec)
    try:
        labels = [t for t in legend_texts(fig) if "KS=" in t]
        assert labels and all(t.endswith("(KS=0)") for t in labels)
    finally:
        plt.close(fig)
    render(spec)


def test_rerender_is_byte_identical(cli_runs, tmp_path):
    a = render(overlay_spec(cli_runs, tmp_path / "a.png"))
    b = render(overlay_spec(cli_runs, tmp_path / "b.png"))
    assert a.read_bytes() == b.read_bytes()


def test_svg_output_is_deterministic(cli_runs, tmp_path):
    a = render(overlay_spec(cli_runs, tmp_path / "a.svg"))
    b = render(overlay_spec(cli_runs, tmp_path / "b.svg"))
    assert a.read_bytes() == b.read_bytes()


def test_cdf_overlay_input_count_checked(cli_runs, tmp_path):
    with pytest.raises(ReportError, match="2n\\+1"):
        render(FigureSpec(
            "cdf-overlay",
            (cli_runs["finite"] / "pairings.csv", cli_runs["limit"] / "pairings.csv"),
            tmp_path / "x.png", "",
        ))


def test_cdf_overlay_empty_input_raises(cli_runs, tmp_path):
    empty = tmp_path / "pairings.csv"
    empty.write_text("replication_id,g_name,value\n", encoding="utf-8")
    spec = FigureSpec(
        "cdf-overlay",
        (empty, cli_runs["limit"] / "pairings.csv", cli_runs["cmp"] / "distances.csv"),
        tmp_path / "x.png", "",
    )
    with pytest.raises(EmptyInputError):
        render(spec)
    assert not (tmp_path / "x.png").exists()


def test_cdf_overlay_rejects_wrong_schema(cli_runs, tmp_path):
    bad = tmp_path / "pairings.csv"
    bad.write_text("rep,g_name,value\n0,1,0.5\n", encoding="utf-8")
    spec = FigureSpec(
        "cdf-overlay",
        (bad, cli_runs["limit"] / "pairings.csv", cli_runs["cmp"] / "distances.csv"),
        tmp_path / "x.png", "",
    )
    with pytest.raises(SchemaError, match="column 1 must be 'replication_id'"):
        render(spec)


def test_theta_curve_renders_one_series_per_box(cli_runs, tmp_path):
    spec = FigureSpec(
        "theta-curve",
        tuple(d / "estimates.csv" for d in cli_runs["theta"]),
        tmp_path / "theta.png",
        "escape probability by box side",
    )
    from dynperc_reports.figures import _render_theta_curve

    fig = _render_theta_curve(spec)
    try:
        assert sorted(legend_texts(fig)) == ["M=5", "M=8"]
    finally:
        plt.close(fig)
    assert render(spec).exists()


def test_theta_curve_needs_manifest(cli_runs, tmp_path):
    orphan = tmp_path / "estimates.csv"
    orphan.write_text("name,value,std_error,n\ntheta_M,0.5,0.01,100\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="no manifest"):
        render(FigureSpec("theta-curve", (orphan,), tmp_path / "x.png", ""))


def test_theta_curve_needs_theta_rows(cli_runs, tmp_path):
    spec = FigureSpec(
        "theta-curve", (cli_runs["mu"] / "estimates.csv",), tmp_path / "x.png", ""
    )
    with pytest.raises(SchemaError, match="theta_M"):
        render(spec)


def test_mu_convergence_renders(cli_runs, tmp_path):
    out = render(FigureSpec(
        "mu-convergence", (cli_runs["mu"] / "estimates.csv",),
        tmp_path / "mu.png", "stretch factor by band",
    ))
    assert out.exists()


def test_mu_convergence_rejects_foreign_rows(cli_runs, tmp_path):
    spec = FigureSpec(
        "mu-convergence", (cli_runs["theta"][0] / "estimates.csv",), tmp_path / "x.png", ""
    )
    with pytest.raises(SchemaError, match="mu\\[lo,hi\\]"):
        render(spec)


def test_cov_decay_renders(cov_run, tmp_path):
    out = render(FigureSpec(
        "cov-decay", (cov_run / "estimates.csv",), tmp_path / "cov.png",
        "indicator covariance against horizon",
    ))
    assert out.exists()
    sidecar = (tmp_path / "cov.png.caption.txt").read_text(encoding="utf-8")
    assert "seed 94" in sidecar


def test_cov_decay_needs_cov_rows(cli_runs, tmp_path):
    spec = FigureSpec(
        "cov-decay", (cli_runs["mu"] / "estimates.csv",), tmp_path / "x.png", ""
    )
    with pytest.raises(SchemaError, match="cov\\[T="):
        render(spec)


def test_unknown_kind_and_suffix_rejected(cli_runs, tmp_path):
    with pytest.raises(ReportError, match="unknown figure kind"):
        render(FigureSpec("pie", (cli_runs["mu"] / "estimates.csv",), tmp_path / "x.png", ""))
    with pytest.raises(ReportError, match="png or .svg"):
        render(FigureSpec(
            "mu-convergence", (cli_runs["mu"] / "estimates.csv",), tmp_path / "x.pdf", ""
        ))
