/** Arena gateway client: one handle = one session = one match configuration.
 *
 * Mirrors the published environment surface (loadGame / reset / step /
 * numAgents); every call resolves with the (obs, reward, done, info)
 * quadruple exactly as the gateway sent it.
 */

import * as net from 'node:net';

import { FrameDecoder, encodeFrame } from './framing.js';
import {
  ActionArray,
  ErrFrame,
  GameConfig,
  GatewayError,
  MSG,
  PROTOCOL_VERSION,
  Quadruple,
  RespQuadFrame,
  StepInfo,
} from './protocol.js';

export interface ConnectOptions {
  host?: string;
  port?: number;
  timeoutMs?: number;
}

interface Pending {
  resolve: (frame: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

export class ArenaClient {
  readonly numAgents: number;
  private closed = false;
  private episodeDone = false;
  private readonly decoder = new FrameDecoder();
  private readonly queue: Pending[] = [];

  private constructor(private readonly socket: net.Socket, numAgents: number) {
    this.numAgents = numAgents;
    socket.on('data', (chunk) => this.onData(chunk));
    socket.on('error', (err) => this.failAll(err));
    socket.on('close', () => this.failAll(new Error('gateway closed the connection')));
  }

  /** Establish a session: connect, exchange hello/config. */
  static async loadGame(config: GameConfig, options: ConnectOptions = {}): Promise<ArenaClient> {
    const host = options.host ?? '127.0.0.1';
    const port = options.port ?? 9331;
    const socket = await new Promise<net.Socket>((resolve, reject) => {
      const sock = net.createConnection({ host, port }, () => {
        sock.removeListener('error', reject);
        resolve(sock);
      });
      sock.once('error', reject);
      if (options.timeoutMs) {
        sock.setTimeout(options.timeoutMs, () => {
          sock.destroy(new Error('connect timeout'));
        });
      }
    });

    const hello = await new Promise<Record<string, unknown>>((resolve, reject) => {
      const decoder = new FrameDecoder();
      const onData = (chunk: Buffer) => {
        try {
          const frames = decoder.push(chunk) as Array<Record<string, unknown>>;
          if (frames.length > 0) {
            socket.removeListener('data', onData);
            resolve(frames[0]);
          }
        } catch (err) {
          reject(err as Error);
        }
      };
      socket.on('data', onData);
      socket.once('error', reject);
      socket.write(
        encodeFrame({ type: MSG.HELLO, protocol_version: PROTOCOL_VERSION, game_config: config }),
      );
    });

    if (hello.type === MSG.ERR) {
      const err = hello as unknown as ErrFrame;
      socket.destroy();
      throw new GatewayError(err.code, err.message);
    }
    if (hello.type !== MSG.HELLO_OK) {
      socket.destroy();
      throw new Error(`unexpected hello reply: ${String(hello.type)}`);
    }
    return new ArenaClient(socket, Number(hello.num_agents));
  }

  private onData(chunk: Buffer): void {
    let frames: unknown[];
    try {
      frames = this.decoder.push(chunk);
    } catch (err) {
      this.failAll(err as Error);
      return;
    }
    for (const frame of frames) {
      const pending = this.queue.shift();
      if (pending) pending.resolve(frame as Record<string, unknown>);
    }
  }

  private failAll(err: Error): void {
    while (this.queue.length > 0) {
      this.queue.shift()!.reject(err);
    }
  }

  private request(payload: object): Promise<Record<string, unknown>> {
    if (this.closed) {
      return Promise.reject(new GatewayError('closed', 'handle is closed'));
    }
    return new Promise((resolve, reject) => {
      this.queue.push({ resolve, reject });
      this.socket.write(encodeFrame(payload));
    });
  }

  private static toQuadruple(frame: RespQuadFrame): Quadruple {
    const info: StepInfo[] = frame.info.map((entry) => {
      const { raw_state, ...rest } = entry;
      return { ...rest, req_pb: raw_state };
    });
    return [frame.obs, frame.reward, frame.done, info];
  }

  private async quadRequest(payload: object): Promise<Quadruple> {
    const frame = await this.request(payload);
    if (frame.type === MSG.ERR) {
      const err = frame as unknown as ErrFrame;
      throw new GatewayError(err.code, err.message);
    }
    if (frame.type !== MSG.RESP_QUAD) {
      throw new Error(`unexpected reply type: ${String(frame.type)}`);
    }
    const quad = ArenaClient.toQuadruple(frame as unknown as RespQuadFrame);
    this.episodeDone = quad[2].every(Boolean);
    return quad;
  }

  async reset(seed?: number): Promise<Quadruple> {
    const payload: Record<string, unknown> = { type: MSG.REQ_RESET };
    if (seed !== undefined) payload.seed = seed;
    const quad = await this.quadRequest(payload);
    this.episodeDone = false;
    return quad;
  }

  async step(actions: ActionArray[]): Promise<Quadruple> {
    if (this.episodeDone) {
      throw new GatewayError('done', 'step after episode done');
    }
    return this.quadRequest({ type: MSG.REQ_STEP, actions });
  }

  close(): void {
    if (!this.closed) {
      this.closed = true;
      try {
        this.socket.write(encodeFrame({ type: MSG.CLOSE }));
      } catch {
        // best-effort goodbye
      }
      this.socket.end();
      this.socket.destroy();
    }
  }
}
