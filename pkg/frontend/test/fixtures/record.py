#!/usr/bin/env python3
"""Record a live control-protocol session into recorded-stream.ndjson.

Starts the simulator CLI in serve mode on a local port, connects over
TCP, speeds the run up, starts it, and stores every server line
verbatim until the finished clock frame arrives. The recording is the
conformance fixture for the console tests; re-run this script after
protocol changes.
"""

import json
import pathlib
import signal
import socket
import subprocess
import sys
import tempfile
import time

HERE = pathlib.Path(__file__).parent
PORT = 47317
WALL_DEADLINE_S = 120


def main() -> int:
    out_dir = tempfile.mkdtemp(prefix="llnsim-record-")
    proc = subprocess.Popen(
        ["llnsim", "--scenario", str(HERE / "mesh6.json"), "--serve", str(PORT),
         "--out", out_dir],
        stderr=subprocess.PIPE, text=True,
    )
    try:
        banner = proc.stderr.readline()
        if "serving" not in banner:
            print(f"unexpected server banner: {banner!r}", file=sys.stderr)
            return 1
        sock = socket.create_connection(("127.0.0.1", PORT), timeout=10)
        sock.settimeout(WALL_DEADLINE_S)
        reader = sock.makefile("r", encoding="utf-8", newline="\n")

        def send(cmd: dict) -> None:
            sock.sendall((json.dumps(cmd) + "\n").encode("utf-8"))

        send({"cmd": "set_speed", "factor": 50})
        send({"cmd": "start"})

        lines = []
        deadline = time.time() + WALL_DEADLINE_S
        for line in reader:
            lines.append(line.rstrip("\n"))
            frame = json.loads(line)
            if frame["event"] == "clock" and frame["payload"].get("finished"):
                break
            if time.time() > deadline:
                print("timed out waiting for the finished frame", file=sys.stderr)
                return 1
        sock.close()

        target = HERE / "recorded-stream.ndjson"
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        kinds = {}
        for raw in lines:
            frame = json.loads(raw)
            kinds[frame["event"]] = kinds.get(frame["event"], 0) + 1
        print(f"recorded {len(lines)} lines to {target.name}: {kinds}")
        return 0
    finally:
        proc.send_signal(signal.SIGTERM)
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()


if __name__ == "__main__":
    sys.exit(main())
