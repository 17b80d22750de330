"""Shared plumbing: turn a dataclass config into a CLI run."""

import argparse
import dataclasses
import json
import sys

from qpdite import cli


def run(command: str, cfg) -> int:
    """Override dataclass fields from ``--field value`` pairs, then execute."""
    p = argparse.ArgumentParser(description=f"{command} with the defaults below")
    for f in dataclasses.fields(cfg):
        p.add_argument(f"--{f.name.replace('_', '-')}", type=type(getattr(cfg, f.name)), default=getattr(cfg, f.name))
    cfg = type(cfg)(**vars(p.parse_args()))
    print(json.dumps(dataclasses.asdict(cfg)), file=sys.stderr)
    argv = [command]
    for k, v in dataclasses.asdict(cfg).items():
        if isinstance(v, bool):
            if v:
                argv.append(f"--{k.replace('_', '-')}")
            continue
        argv += [f"--{k.replace('_', '-')}", str(v)]
    return cli.main(argv)
