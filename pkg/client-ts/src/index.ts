export { ArenaClient } from './client.js';
export type { ConnectOptions } from './client.js';
export { FrameDecoder, encodeFrame, MAX_FRAME_BYTES } from './framing.js';
export {
  GatewayError,
  MSG,
  PROTOCOL_VERSION,
} from './protocol.js';
export type {
  ActionArray,
  GameConfig,
  Quadruple,
  RespQuadFrame,
  StepInfo,
} from './protocol.js';
