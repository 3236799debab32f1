"""Line-JSON control server for a live simulation.

One engine, one drive thread, any number of TCP clients. Every client
line is a JSON object {"cmd": ...}; every server line is a JSON object
{"event": ..., "t_us": ..., "payload": ...}. Commands are queued into
the engine and applied at event boundaries, so readers never touch
engine state directly; replies come back as "ack" or "error" events.

The drive thread paces virtual time against a wall-clock anchor scaled
by the speed factor. The engine starts paused; a "start" command
releases it. Notes sent via "save_note" replace a plain text file kept
next to the scenario, nothing else persists server-side.
"""

from __future__ import annotations

import json
import logging
import socket
import threading
import time
from pathlib import Path
from typing import List, Optional

from .engine import Engine

log = logging.getLogger("llnsim.server")

PAUSED_POLL_S = 0.02     # command latency bound while paused
MAX_SLICE_S = 0.05       # re-check commands at least this often while pacing
MIN_SLEEP_S = 0.002      # below this lag, just step


class _Client:
    def __init__(self, sock: socket.socket, peer: str):
        self.sock = sock
        self.peer = peer
        self._lock = threading.Lock()

    def send(self, frame: dict) -> bool:
        data = (json.dumps(frame) + "\n").encode("utf-8")
        try:
            with self._lock:
                self.sock.sendall(data)
            return True
        except OSError:
            return False

    def close(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


class Server:
    """Serve one engine over TCP until stopped."""

    def __init__(self, engine: Engine, port: int, notes_path: Path, host: str = "127.0.0.1"):
        self.engine = engine
        self.notes_path = Path(notes_path)
        self._host = host
        self._requested_port = port
        self._listener: Optional[socket.socket] = None
        self._clients: List[_Client] = []
        self._clients_lock = threading.Lock()
        self._threads: List[threading.Thread] = []
        self._stop = threading.Event()
        engine.add_observer(self._broadcast)

    @property
    def port(self) -> int:
        if self._listener is None:
            raise RuntimeError("server is not listening")
        return self._listener.getsockname()[1]

    def start(self) -> None:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self._host, self._requested_port))
        listener.listen()
        # closing a listener does not wake a blocked accept() on Linux
        listener.settimeout(0.2)
        self._listener = listener
        for target, name in ((self._accept_loop, "accept"), (self._drive_loop, "drive")):
            thread = threading.Thread(target=target, name=f"llnsim-{name}", daemon=True)
            thread.start()
            self._threads.append(thread)

    def wait(self) -> None:
        """Block the calling thread until someone asks the server to stop."""
        self._stop.wait()

    def request_stop(self) -> None:
        self._stop.set()

    def stop(self) -> None:
        self._stop.set()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._clients_lock:
            clients = list(self._clients)
            self._clients.clear()
        for client in clients:
            client.close()
        for thread in list(self._threads):
            thread.join(timeout=2.0)

    # -- event fan-out ------------------------------------------------------------------

    def _broadcast(self, frame: dict) -> None:
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            if not client.send(frame):
                self._drop(client)

    def _drop(self, client: _Client) -> None:
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)
        client.close()
        log.info("client %s disconnected", client.peer)

    # -- socket threads -----------------------------------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while not self._stop.is_set():
            try:
                sock, addr = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            client = _Client(sock, f"{addr[0]}:{addr[1]}")
            with self._clients_lock:
                self._clients.append(client)
            log.info("client %s connected", client.peer)
            self._send_initial_state(client)
            thread = threading.Thread(
                target=self._reader_loop, args=(client,), name=f"llnsim-read-{client.peer}",
                daemon=True,
            )
            thread.start()
            self._threads.append(thread)

    def _send_initial_state(self, client: _Client) -> None:
        def deliver(result: dict) -> None:
            state = result.get("state", {})
            t_us = state.get("t_us", 0)
            client.send({"event": "mote_state", "t_us": t_us,
                         "payload": {"motes": state.get("motes", [])}})
            client.send({"event": "dodag_update", "t_us": t_us,
                         "payload": state.get("dodag", {})})
            client.send({"event": "clock", "t_us": t_us,
                         "payload": {"now_us": t_us, "speed": state.get("speed", 1.0),
                                     "running": state.get("running", False)}})

        self.engine.submit({"cmd": "get_state"}, reply=deliver)

    def _reader_loop(self, client: _Client) -> None:
        reader = client.sock.makefile("r", encoding="utf-8", newline="\n")
        try:
            for line in reader:
                line = line.strip()
                if not line:
                    continue
                self._handle_line(client, line)
        except OSError:
            pass
        finally:
            self._drop(client)

    def _handle_line(self, client: _Client, line: str) -> None:
        try:
            cmd = json.loads(line)
        except json.JSONDecodeError as exc:
            self._send_error(client, f"bad JSON: {exc}")
            return
        if not isinstance(cmd, dict) or not isinstance(cmd.get("cmd"), str):
            self._send_error(client, "commands are objects with a 'cmd' string")
            return
        name = cmd["cmd"]
        if name == "save_note":
            self._save_note(client, cmd)
            return

        def reply(result: dict) -> None:
            if result.get("ok"):
                payload = {"cmd": name}
                if "state" in result:
                    payload["state"] = result["state"]
                client.send({"event": "ack", "t_us": self.engine.now, "payload": payload})
            else:
                self._send_error(client, result.get("error", "command failed"), cmd=name)

        self.engine.submit(cmd, reply=reply)

    def _save_note(self, client: _Client, cmd: dict) -> None:
        text = cmd.get("text")
        if not isinstance(text, str):
            self._send_error(client, "save_note needs a 'text' string", cmd="save_note")
            return
        try:
            self.notes_path.write_text(text, encoding="utf-8")
        except OSError as exc:
            self._send_error(client, f"cannot write notes: {exc}", cmd="save_note")
            return
        client.send({
            "event": "ack", "t_us": self.engine.now,
            "payload": {"cmd": "save_note", "bytes": len(text.encode("utf-8"))},
        })

    def _send_error(self, client: _Client, message: str, cmd: Optional[str] = None) -> None:
        payload = {"message": message}
        if cmd is not None:
            payload["cmd"] = cmd
        client.send({"event": "error", "t_us": self.engine.now, "payload": payload})

    # -- pacing -------------------------------------------------------------------------

    def _drive_loop(self) -> None:
        eng = self.engine
        anchor_wall: Optional[float] = None
        anchor_virtual = 0
        anchor_speed = eng.speed
        while not self._stop.is_set():
            next_at = eng.next_event_at()    # also drains queued commands
            if not eng.running:
                anchor_wall = None
                self._stop.wait(PAUSED_POLL_S)
                continue
            if next_at is None:
                eng.finalize()
                eng.running = False
                anchor_wall = None
                self._broadcast({
                    "event": "clock", "t_us": eng.now,
                    "payload": {"now_us": eng.now, "speed": eng.speed, "finished": True},
                })
                continue
            if anchor_wall is None or eng.speed != anchor_speed:
                anchor_wall = time.monotonic()
                anchor_virtual = eng.now
                anchor_speed = eng.speed
            target = anchor_wall + (next_at - anchor_virtual) / (anchor_speed * 1e6)
            lag = target - time.monotonic()
            if lag > MIN_SLEEP_S:
                # sleep in slices so pause/speed commands stay responsive
                self._stop.wait(min(lag, MAX_SLICE_S))
                continue
            eng.step()
