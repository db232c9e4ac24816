#!/usr/bin/env python3
"""Download the benchmark graphs and convert them to edge/label files.

Needs outbound network access. Results land in data/ next to the repository
root (override with --out); the data-gated tests pick them up from there.

Usage:
    python3 scripts/fetch_datasets.py             # everything
    python3 scripts/fetch_datasets.py cora polblogs
"""

from __future__ import annotations

import argparse
import io
import sys
import tarfile
import urllib.request
import zipfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from custard.datasets import (  # noqa: E402
    convert_content_cites,
    convert_csv_pair,
    convert_gml,
    write_dataset,
)

LINQS = "https://linqs-data.soe.ucsc.edu/public/lbc"
POLBLOGS_URLS = (
    "https://websites.umich.edu/~mejn/netdata/polblogs.zip",
    "http://www-personal.umich.edu/~mejn/netdata/polblogs.zip",
)
FACEBOOK_URL = "https://snap.stanford.edu/data/facebook_large.zip"


def fetch(url: str) -> bytes:
    request = urllib.request.Request(url, headers={"User-Agent": "dataset-fetch/1.0"})
    with urllib.request.urlopen(request, timeout=120) as response:
        return response.read()


def tar_member(blob: bytes, suffix: str) -> str:
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as archive:
        for member in archive.getmembers():
            if member.name.endswith(suffix):
                return archive.extractfile(member).read().decode("utf-8", errors="replace")
    raise FileNotFoundError(f"no member ending in {suffix}")


def zip_member(blob: bytes, suffix: str) -> str:
    with zipfile.ZipFile(io.BytesIO(blob)) as archive:
        for name in archive.namelist():
            if name.endswith(suffix):
                return archive.read(name).decode("utf-8", errors="replace")
    raise FileNotFoundError(f"no member ending in {suffix}")


def fetch_citation_network(name: str, out_dir: Path) -> None:
    blob = fetch(f"{LINQS}/{name}.tgz")
    content = tar_member(blob, f"{name}.content")
    cites = tar_member(blob, f"{name}.cites")
    edges, labels = convert_content_cites(content, cites)
    write_dataset(name, edges, labels, out_dir)


def fetch_polblogs(out_dir: Path) -> None:
    last_error: Exception | None = None
    for url in POLBLOGS_URLS:
        try:
            blob = fetch(url)
            break
        except Exception as exc:  # try the mirror
            last_error = exc
    else:
        raise RuntimeError(f"all polblogs mirrors failed: {last_error}")
    gml = zip_member(blob, "polblogs.gml")
    edges, labels = convert_gml(gml, label_key="value")
    write_dataset("polblogs", edges, labels, out_dir)


def fetch_facebook(out_dir: Path) -> None:
    blob = fetch(FACEBOOK_URL)
    edges_csv = zip_member(blob, "musae_facebook_edges.csv")
    target_csv = zip_member(blob, "musae_facebook_target.csv")
    edges, labels = convert_csv_pair(edges_csv, target_csv, "page_type")
    write_dataset("facebook", edges, labels, out_dir)


FETCHERS = {
    "cora": lambda out: fetch_citation_network("cora", out),
    "citeseer": lambda out: fetch_citation_network("citeseer", out),
    "polblogs": fetch_polblogs,
    "facebook": fetch_facebook,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("datasets", nargs="*",
                        help=f"subset of {', '.join(FETCHERS)} (default: all)")
    parser.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data",
                        type=Path, help="output directory (default: <repo>/data)")
    args = parser.parse_args(argv)
    unknown = [name for name in args.datasets if name not in FETCHERS]
    if unknown:
        parser.error(f"unknown datasets: {', '.join(unknown)}")
    wanted = args.datasets or list(FETCHERS)
    failures = 0
    for name in wanted:
        try:
            FETCHERS[name](args.out)
            print(f"{name}: ok -> {args.out / name}.edges")
        except Exception as exc:
            failures += 1
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
