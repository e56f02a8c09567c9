import argparse
import os
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-service")
    sub = parser.add_subparsers(dest="command", required=True)
    p_serve = sub.add_parser("serve", help="run the scoring service")
    p_serve.add_argument("--port", type=int, default=8800)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument(
        "--store",
        default=os.environ.get("SCORER_SERVICE_STORE", "scorer-models"),
        help="model store directory (default $SCORER_SERVICE_STORE or ./scorer-models)",
    )
    p_serve.add_argument("--model", default=None, help="model id to serve (default: base model)")
    args = parser.parse_args(argv)

    from .service import serve

    serve(args.store, port=args.port, host=args.host, model_id=args.model)
    return 0


if __name__ == "__main__":
    sys.exit(main())
