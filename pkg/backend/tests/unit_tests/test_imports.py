"""Shallow tests that make sure we can at least import the code."""


def test_import_library() -> None:
    """Every library module imports without side effects."""
    import eqbn.cover_twist_lab  # noqa: F401
    import eqbn.exact_linalg  # noqa: F401
    import eqbn.fredholm_reduction  # noqa: F401
    import eqbn.jet_calculus  # noqa: F401
    import eqbn.orbifold_index  # noqa: F401
    import eqbn.rep_theory  # noqa: F401
    import eqbn.wendl_certifier  # noqa: F401


def test_import_cli() -> None:
    """Test import cli"""
    from eqbn.cli import cli
    from eqbn.schema import COMMANDS

    assert set(COMMANDS) <= set(cli.commands)


def test_version() -> None:
    import eqbn

    assert eqbn.__version__.count(".") == 2
