"""SDK integration fixtures: a live loopback server over a 20-case manifest.

The server side comes from the cubelab package (a test-only dependency); the
SDK under test only ever touches the wire.
"""

import pytest


@pytest.fixture(scope="session")
def manifest_path(tmp_path_factory):
    from cubelab.observe import Tier
    from cubelab.optimal import build_pdbs
    from cubelab.tasks import SplitConfig, TaskGenerator, write_manifest
    from cubelab.twophase import build_tables

    gen = TaskGenerator(build_tables(), build_pdbs())
    split = gen.generate_split(SplitConfig(
        depths=(1, 2, 3, 4), states_per_depth=5,
        settings=(Tier.FULL_SYMBOLIC,), master_seed=1234))
    path = tmp_path_factory.mktemp("manifest") / "short.jsonl"
    write_manifest(split, path)
    return path


@pytest.fixture(scope="session")
def server(manifest_path):
    from cubelab.service import serve
    from cubelab.twophase import build_tables

    srv = serve("127.0.0.1:0", tables=build_tables(), manifest=manifest_path,
                background=True)
    yield srv
    srv.shutdown()


@pytest.fixture(scope="session")
def address(server):
    host, port = server.server_address
    return (host, port)


@pytest.fixture(scope="session")
def case_ids(manifest_path):
    from cubelab.tasks import load_manifest

    return [c.id for c in load_manifest(manifest_path).cases]
