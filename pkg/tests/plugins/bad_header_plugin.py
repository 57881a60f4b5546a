#!/usr/bin/env python3
"""Test plugin that writes a CSV whose header does not match the training file."""

import argparse
import sys

parser = argparse.ArgumentParser()
parser.add_argument("--train")
parser.add_argument("--n", type=int)
parser.add_argument("--out")
parser.add_argument("--seed", type=int)
parser.add_argument("--hparams", default=None)
args = parser.parse_args()

with open(args.out, "w", encoding="utf-8") as f:
    f.write("wrong,columns\n1,2\n")
sys.exit(0)
