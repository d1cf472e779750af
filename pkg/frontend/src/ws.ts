// WebSocket connection with auto-reconnect and a bounded offline send queue.

import { encodeCommand, parseFrame, isErrorFrame } from "./protocol.js";
import { expireQueue, type PendingSend } from "./state.js";
import type { Command, ErrorFrame, Snapshot } from "./types.js";

export interface ConnectionCallbacks {
  onOpen(): void;
  onClose(): void;
  onSnapshot(snapshot: Snapshot): void;
  onErrorFrame(frame: ErrorFrame): void;
}

const RECONNECT_DELAY_MS = 1000;

export class Connection {
  private socket: WebSocket | null = null;
  private queue: PendingSend[] = [];
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly callbacks: ConnectionCallbacks,
  ) {
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.callbacks.onOpen();
      this.flush();
    };
    socket.onmessage = (ev) => {
      const frame = parseFrame(String(ev.data));
      if (frame === null) return;
      if (isErrorFrame(frame)) this.callbacks.onErrorFrame(frame);
      else this.callbacks.onSnapshot(frame);
    };
    socket.onclose = () => {
      this.socket = null;
      this.callbacks.onClose();
      setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
    };
    socket.onerror = () => {
      socket.close();
    };
  }

  send(command: Command): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(encodeCommand(command));
      return;
    }
    this.queue.push({ command, queuedAtMs: Date.now() });
  }

  private flush(): void {
    this.queue = expireQueue(this.queue, Date.now());
    for (const pending of this.queue) {
      this.socket?.send(encodeCommand(pending.command));
    }
    this.queue = [];
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
