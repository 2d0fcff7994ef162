/** Gateway message types and payload shapes. */

export const PROTOCOL_VERSION = 1;

export const MSG = {
  HELLO: 'HELLO',
  HELLO_OK: 'HELLO_OK',
  REQ_RESET: 'REQ_RESET',
  REQ_STEP: 'REQ_STEP',
  RESP_QUAD: 'RESP_QUAD',
  ERR: 'ERR',
  CLOSE: 'CLOSE',
} as const;

export interface GameConfig {
  camp0_hero?: string;
  camp1_hero?: string;
  seed?: number;
  time_limit_s?: number;
  /** Camps driven by the gateway itself, e.g. {"1": "bt:1"}. */
  opponents?: Record<string, string>;
}

/** The six-head action triplet: [button, move_x, move_z, skill_x, skill_z, target]. */
export type ActionArray = [number, number, number, number, number, number];

export interface StepInfo {
  observation: number[];
  legal_action: number[];
  sub_action_mask: number[][];
  done: number;
  frame_no: number;
  reward: number;
  game_id: string;
  player_id: string;
  /** Opaque serialized engine state (exposed under the familiar name). */
  req_pb: string;
}

export type Quadruple = [number[][], number[], boolean[], StepInfo[]];

export interface RespQuadFrame {
  type: typeof MSG.RESP_QUAD;
  game_id: string;
  obs: number[][];
  reward: number[];
  done: boolean[];
  info: Array<Omit<StepInfo, 'req_pb'> & { raw_state: string }>;
}

export interface ErrFrame {
  type: typeof MSG.ERR;
  code: string;
  message: string;
}

export class GatewayError extends Error {
  constructor(public readonly code: string, message: string) {
    super(`[${code}] ${message}`);
    this.name = 'GatewayError';
  }
}
