#!/usr/bin/env python3
"""Run the operator service (and, when built, the browser front panel).

The listen address comes from --addr, then the LEDSORT_ADDR environment
variable, then 127.0.0.1:8787. Job documents POSTed to the service resolve
lot/screen references against --assets.
"""

import argparse
from pathlib import Path

from ledsort.service import OperatorService, make_server


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--addr", default=None, help="host:port (default: $LEDSORT_ADDR)")
    parser.add_argument("--assets", default=".", type=Path, help="directory with lot/screen files")
    parser.add_argument("--reports", default="reports", type=Path, help="report output directory")
    parser.add_argument(
        "--ui",
        default=None,
        type=Path,
        help="static UI directory (e.g. frontend/dist); served at /",
    )
    parser.add_argument("--screen", default=None, type=Path, help="initial screen document")
    args = parser.parse_args()

    screen = None
    if args.screen is not None:
        from ledsort.configio import load_screen

        screen = load_screen(args.screen)

    service = OperatorService(screen=screen, report_dir=args.reports, asset_dir=args.assets)
    server = make_server(service, args.addr, static_dir=args.ui)
    host, port = server.server_address[:2]
    # flush so supervisors (and the UI integration tests) see the address
    print(f"operator service listening on http://{host}:{port}", flush=True)
    if args.ui is not None:
        print(f"serving UI from {args.ui}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


if __name__ == "__main__":
    main()
