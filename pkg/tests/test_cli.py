from craql.cli import main
from craql.fixtures import fixture_text


def make_root(tmp_path, with_project=True):
    for sub in ("projects", "queries", "properties", "results"):
        (tmp_path / sub).mkdir(parents=True, exist_ok=True)
    if with_project:
        pdir = tmp_path / "projects" / "alpha"
        pdir.mkdir()
        (pdir / "Sample.mj").write_text(fixture_text("Sample.mj"))
    (tmp_path / "queries" / "blocks.craql").write_text(
        "select ({Block} b) { num_blocks += 1; print(num_blocks); }"
    )
    (tmp_path / "projects.txt").write_text("alpha\n")
    (tmp_path / "queries.txt").write_text("blocks.craql\n")
    return tmp_path


def run_main(tmp_path, *extra):
    return main([
        "-P", str(tmp_path / "projects.txt"),
        "-Q", str(tmp_path / "queries.txt"),
        "--dirs", str(tmp_path),
        *extra,
    ])


def test_run_exit_zero_and_prints_to_stdout(tmp_path, capsys):
    root = make_root(tmp_path)
    assert run_main(root) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["1", "2", "3"]
    assert (root / "results" / "alpha.vars").read_text() == "num_blocks=3\n"


def test_missing_project_exits_one(tmp_path):
    root = make_root(tmp_path, with_project=False)
    assert run_main(root) == 1


def test_config_error_exits_two(tmp_path):
    (tmp_path / "projects.txt").write_text("alpha\n")
    (tmp_path / "queries.txt").write_text("blocks.craql\n")
    assert run_main(tmp_path) == 2


def test_collate_subcommand(tmp_path, capsys):
    root = make_root(tmp_path)
    run_main(root)
    assert main(["collate", "--dirs", str(root)]) == 0
    assert (root / "results" / "craql_output.csv").exists()


def test_collate_without_vars_exits_two(tmp_path):
    make_root(tmp_path, with_project=False)
    assert main(["collate", "--dirs", str(tmp_path)]) == 2


def test_genprops_subcommand(tmp_path):
    root = make_root(tmp_path)
    (root / "properties" / "projecttags.csv").write_text("project,tag\nalpha,core\n")
    assert main(["genprops", "--dirs", str(root)]) == 0
    assert (root / "properties" / "alpha.properties").read_text() == "tag=core\n"


def test_jobs_flag(tmp_path):
    root = make_root(tmp_path)
    assert run_main(root, "--jobs", "2") == 0


def test_recursion_limit_flag(tmp_path):
    root = make_root(tmp_path)
    (root / "queries" / "loop.craql").write_text(
        "q1 : select ({CompilationUnit} u) { callquery(q1); }"
    )
    (root / "queries.txt").write_text("loop.craql\n")
    assert run_main(root, "--recursion-limit", "8") == 1
