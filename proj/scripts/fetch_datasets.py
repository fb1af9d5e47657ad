#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Download the UCI benchmark archives into data/raw/.

Graduate Admission 2 comes from Kaggle and needs a login; place Admission_Predict.csv in
data/ by hand. See docs/datasets.md for column mappings.
"""

import argparse
import pathlib
import sys
import urllib.request
import zipfile

UCI = {
    "landsat": (146, "statlog+landsat+satellite"),
    "sonar": (151, "connectionist+bench+sonar+mines+vs+rocks"),
    "communities": (183, "communities+and+crime"),
    "ct-slices": (206, "relative+location+of+ct+slices+on+axial+axis"),
    "urban-land-cover": (295, "urban+land+cover"),
}


def fetch(name, dest):
    uid, slug = UCI[name]
    url = f"https://archive.ics.uci.edu/static/public/{uid}/{slug.replace('+', '_')}.zip"
    target = dest / name
    target.mkdir(parents=True, exist_ok=True)
    archive = target / "archive.zip"
    print(f"{name}: {url}")
    urllib.request.urlretrieve(url, archive)
    with zipfile.ZipFile(archive) as z:
        z.extractall(target)
    archive.unlink()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", metavar="NAME", help=", ".join(UCI))
    parser.add_argument("--dest", type=pathlib.Path, default=pathlib.Path("data/raw"))
    args = parser.parse_args()
    unknown = set(args.names) - set(UCI)
    if unknown:
        parser.error(f"unknown dataset: {', '.join(sorted(unknown))}")
    failed = []
    for name in args.names or list(UCI):
        try:
            fetch(name, args.dest)
        except OSError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
