# Copyright 2026 The selfcheck Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Self-checking source verification and BB84 simulation.

Structured results are plain dicts in the same schema the CLI writes.
"""

import json as _json

from . import _selfcheck
from ._selfcheck import (
    ContractError,
    PreconditionError,
    ShapeError,
    Source,
    StructuralError,
    ValidationError,
    build_classical_source,
    build_ideal_source,
    build_random_extended_ideal,
    load_source,
    perturb_source,
)

__all__ = [
    "ContractError",
    "PreconditionError",
    "ShapeError",
    "Source",
    "StructuralError",
    "ValidationError",
    "bb84",
    "bb84_exact",
    "build_classical_source",
    "build_ideal_source",
    "build_random_extended_ideal",
    "check_conjugate",
    "check_self_checking",
    "correlation_table",
    "decompose",
    "diagnose",
    "empirical_check",
    "gallery",
    "ideal_reference_table",
    "load_source",
    "perturb_source",
    "run_cli",
]


def correlation_table(source):
    return _json.loads(_selfcheck.correlation_table_json(source))


def ideal_reference_table():
    return _json.loads(_selfcheck.ideal_reference_table_json())


def check_conjugate(source, tol=1e-9):
    return _json.loads(_selfcheck.check_conjugate_json(source, tol))


def check_self_checking(source, tol=1e-9):
    return _json.loads(_selfcheck.check_self_checking_json(source, tol))


def empirical_check(source, n_samples, seed=0, eps=0.01):
    return _json.loads(_selfcheck.empirical_check_json(source, n_samples, seed, eps))


def decompose(source, tol=1e-9, lemma_tol=1e-8):
    return _json.loads(_selfcheck.decompose_json(source, tol, lemma_tol))


def diagnose(source, lemma_tol=1e-8):
    return _json.loads(_selfcheck.diagnose_json(source, lemma_tol))


def bb84(source, n, eve="none", seed=0):
    return _json.loads(_selfcheck.bb84_json(source, n, eve, seed))


def bb84_exact(source, eve="none"):
    return _json.loads(_selfcheck.bb84_exact_json(source, eve))


def gallery():
    """List of (name, source, manifest entry) in corpus order."""
    return [(name, src, _json.loads(entry)) for name, src, entry in _selfcheck.gallery()]


def run_cli(args):
    """Runs the command-line interface in-process; returns (code, stdout, stderr)."""
    return _selfcheck.run_cli(list(args))
