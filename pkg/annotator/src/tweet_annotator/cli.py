"""Command line for the annotator: annotate tweets, export the
similarity table."""

from __future__ import annotations

import argparse
import sys

from .pipeline import annotate, export_similarity_table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tweet-annotator", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="tweet JSONL -> annotated JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("export-similarity", help="write the word/resource similarity TSV")
    p.add_argument("--resources", required=True, help="resource terms, one per line or TSV")
    p.add_argument("--vocabulary", required=True, help="corpus words, one per line")
    p.add_argument("--output", required=True)
    p.add_argument("--threshold", type=float, default=0.8)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "annotate":
            n = annotate(args.input, args.output)
            print(f"annotated {n} tweets -> {args.output}")
        else:
            n = export_similarity_table(
                args.resources, args.vocabulary, args.output, args.threshold
            )
            print(f"wrote {n} similarity rows -> {args.output}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
