"""Command-line entry: one corpus in, one vector file out.

Exit codes: 0 success, 2 input/validation error, 1 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from .errors import ExportError
from .export import ExportJob, export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Encode a JSON-lines corpus into a tab-separated vector file.",
    )
    parser.add_argument("--corpus", required=True, help="corpus file (JSON lines)")
    parser.add_argument(
        "--encoder",
        required=True,
        help="encoder name: hash-<dim> or a sentence-transformers model",
    )
    parser.add_argument("--out", required=True, help="vector file path")
    parser.add_argument(
        "--batch-size", type=int, default=32, help="samples per encode call (default 32)"
    )
    parser.add_argument(
        "--no-normalize",
        action="store_true",
        help="keep raw vector lengths instead of unit L2",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job_kwargs = dict(
        corpus_path=args.corpus,
        encoder=args.encoder,
        out_path=args.out,
        batch_size=args.batch_size,
        normalize=not args.no_normalize,
    )
    try:
        job = ExportJob(**job_kwargs)
        path = export(job)
    except (ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return 1
    print(f"wrote {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
