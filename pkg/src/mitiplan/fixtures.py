"""Bundled reference dataset (``paper_v13``).

Transcription of the published top-10 ATT&CK v13 technique scores and
the technique-to-mitigation mapping they pair with: 10 techniques, 18
mitigations, 46 mapping pairs.  Embedded as string constants so the
reference reproduction runs offline with zero downloads.  Mitigation
names are not part of the source tables and are left empty; supply a
``mitigation_id,name`` CSV to :func:`mitiplan.catalog.parse_mapping_csv`
if you want named output.
"""

from __future__ import annotations

from pathlib import Path

from .catalog import Catalog, parse_mapping_csv, save_catalog
from .errors import ValidationError
from .scoring import WeightVector, load_weights

PAPER_V13_WEIGHTS_CSV = """\
no,score,tid,name
1,2.951542857,T1053,Scheduled Task/Job
2,2.914285714,T1059,Command and Scripting Interpreter
3,2.519447619,T1562,Impair Defenses
4,2.330395238,T1055,Process Injection
5,2.260190476,T1036,Masquerading
6,2.253380952,T1218,Signed Binary Proxy Execution
7,2.18777619,T1574,Hijack Execution Flow
8,2.183333333,T1047,Windows Management Instrumentation
9,2.116466667,T1543,Create or Modify System Process
10,1.922504762,T1112,Modify Registry
"""

PAPER_V13_TECHNIQUES_CSV = """\
technique_id,name
T1053,Scheduled Task/Job
T1059,Command and Scripting Interpreter
T1562,Impair Defenses
T1055,Process Injection
T1036,Masquerading
T1218,Signed Binary Proxy Execution
T1574,Hijack Execution Flow
T1047,Windows Management Instrumentation
T1543,Create or Modify System Process
T1112,Modify Registry
"""

PAPER_V13_MAPPINGS_CSV = """\
technique_id,mitigation_id
T1053,M1047
T1053,M1028
T1053,M1026
T1053,M1018
T1059,M1049
T1059,M1040
T1059,M1045
T1059,M1042
T1059,M1038
T1059,M1026
T1059,M1021
T1562,M1038
T1562,M1022
T1562,M1024
T1562,M1018
T1055,M1040
T1055,M1026
T1036,M1045
T1036,M1038
T1036,M1022
T1218,M1042
T1218,M1038
T1218,M1050
T1218,M1026
T1574,M1013
T1574,M1047
T1574,M1040
T1574,M1038
T1574,M1022
T1574,M1044
T1574,M1024
T1574,M1051
T1574,M1052
T1574,M1018
T1047,M1040
T1047,M1038
T1047,M1026
T1047,M1018
T1543,M1047
T1543,M1040
T1543,M1045
T1543,M1033
T1543,M1028
T1543,M1022
T1543,M1018
T1112,M1024
"""

FIXTURE_NAMES = ("paper_v13",)


def paper_v13_weights() -> WeightVector:
    """The bundled top-10 technique weight vector."""
    return load_weights(PAPER_V13_WEIGHTS_CSV)


def paper_v13_catalog() -> Catalog:
    """The bundled technique/mitigation catalog (46 mapping pairs)."""
    return parse_mapping_csv(PAPER_V13_TECHNIQUES_CSV, PAPER_V13_MAPPINGS_CSV)


def emit_fixture(name: str, out_dir: str | Path) -> list[Path]:
    """Write a bundled fixture's files into ``out_dir``; returns the paths.

    For ``paper_v13`` this writes the weights CSV, the techniques CSV,
    the mapping CSV, and the corresponding canonical catalog JSON.
    """
    if name not in FIXTURE_NAMES:
        known = ", ".join(FIXTURE_NAMES)
        raise ValidationError(f"unknown fixture {name!r} (available: {known})")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix, content in (
        ("weights.csv", PAPER_V13_WEIGHTS_CSV),
        ("techniques.csv", PAPER_V13_TECHNIQUES_CSV),
        ("mappings.csv", PAPER_V13_MAPPINGS_CSV),
    ):
        path = out_dir / f"{name}_{suffix}"
        path.write_text(content, encoding="utf-8")
        written.append(path)
    catalog_path = out_dir / f"{name}_catalog.json"
    save_catalog(paper_v13_catalog(), catalog_path)
    written.append(catalog_path)
    return written
