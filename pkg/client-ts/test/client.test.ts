import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ArenaClient, GatewayError } from '../src/index.js';
import type { ActionArray, StepInfo } from '../src/index.js';
import {
  Gateway,
  RecordingProxy,
  startGateway,
  startRecordingProxy,
} from './gateway.js';

const MOVE_FORWARD: ActionArray = [1, 0, 4, 0, 0, 0];
const IDLE: ActionArray = [0, 0, 0, 0, 0, 0];

let gateway: Gateway;

beforeAll(async () => {
  gateway = await startGateway();
}, 30000);

afterAll(() => {
  gateway.stop();
});

describe('ArenaClient', () => {
  it('loads a game with two agents', async () => {
    const env = await ArenaClient.loadGame({ seed: 1 }, { port: gateway.port });
    expect(env.numAgents).toBe(2);
    env.close();
  });

  it('rejects unknown heroes with a config error', async () => {
    await expect(
      ArenaClient.loadGame({ camp0_hero: 'nosuch' }, { port: gateway.port }),
    ).rejects.toThrowError(GatewayError);
  });

  it('returns length-2 quadruple lists from reset and step', async () => {
    const env = await ArenaClient.loadGame({ seed: 5 }, { port: gateway.port });
    const [obs, reward, done, info] = await env.reset();
    expect(obs).toHaveLength(2);
    expect(reward).toHaveLength(2);
    expect(done).toHaveLength(2);
    expect(info).toHaveLength(2);
    expect(obs[0]).toHaveLength(385);
    expect(info[0].legal_action).toHaveLength(83);
    expect(info[0].sub_action_mask).toHaveLength(11);
    expect(info[0].req_pb.length).toBeGreaterThan(0);
    const [obs2, , done2] = await env.step([IDLE, IDLE]);
    expect(obs2).toHaveLength(2);
    expect(done2).toEqual([false, false]);
    env.close();
  });

  it(
    'completes a full episode against bt:1 (published-interface loop)',
    async () => {
      const env = await ArenaClient.loadGame(
        { seed: 42, time_limit_s: 90, opponents: { '1': 'bt:1' } },
        { port: gateway.port },
      );
      let [, , , info] = await env.reset();
      let done = false;
      let steps = 0;
      let totalReward = 0;
      while (!done) {
        const actions: ActionArray[] = [];
        for (let i = 0; i < env.numAgents; i += 1) {
          actions.push(MOVE_FORWARD);
          done = done || info[i].done === 1;
        }
        const [, reward, dones, nextInfo] = await env.step(actions);
        info = nextInfo;
        totalReward += reward[0];
        done = done || dones.every(Boolean);
        steps += 1;
      }
      expect(steps).toBeGreaterThan(10);
      expect(info.every((entry: StepInfo) => entry.done === 1)).toBe(true);
      env.close();
    },
    120000,
  );

  it('raises on step after done', async () => {
    const env = await ArenaClient.loadGame(
      { seed: 7, time_limit_s: 5, opponents: { '1': 'bt:1' } },
      { port: gateway.port },
    );
    await env.reset();
    for (;;) {
      const [, , dones] = await env.step([IDLE, IDLE]);
      if (dones.every(Boolean)) break;
    }
    await expect(env.step([IDLE, IDLE])).rejects.toThrowError(/done/);
    env.close();
  });

  it('independent sessions do not interfere', async () => {
    const a = await ArenaClient.loadGame({ seed: 11 }, { port: gateway.port });
    const b = await ArenaClient.loadGame({ seed: 11 }, { port: gateway.port });
    const [obsA] = await a.reset();
    await a.step([IDLE, IDLE]);
    const [obsB] = await b.reset();
    expect(obsA[0]).toEqual(obsB[0]);
    a.close();
    b.close();
  });
});

describe('transcript fidelity', () => {
  let proxy: RecordingProxy;

  beforeAll(async () => {
    proxy = await startRecordingProxy(gateway.port);
  });

  afterAll(() => {
    proxy.stop();
  });

  it('SDK quadruples equal the recorded RESP_QUAD frames field-by-field', async () => {
    const env = await ArenaClient.loadGame(
      { seed: 99, time_limit_s: 30, opponents: { '1': 'bt:1' } },
      { port: proxy.port },
    );
    const quads = [await env.reset()];
    for (let i = 0; i < 8; i += 1) {
      quads.push(await env.step([MOVE_FORWARD, MOVE_FORWARD]));
    }
    env.close();

    const respFrames = proxy.frames
      .filter((f) => f.direction === 'server->client' && f.payload.type === 'RESP_QUAD')
      .map((f) => f.payload as Record<string, unknown>);
    expect(respFrames).toHaveLength(quads.length);

    quads.forEach(([obs, reward, done, info], idx) => {
      const frame = respFrames[idx] as {
        obs: number[][];
        reward: number[];
        done: boolean[];
        info: Array<Record<string, unknown>>;
      };
      expect(obs).toEqual(frame.obs);
      expect(reward).toEqual(frame.reward);
      expect(done).toEqual(frame.done);
      info.forEach((entry, agent) => {
        const wire = frame.info[agent];
        expect(entry.observation).toEqual(wire.observation);
        expect(entry.legal_action).toEqual(wire.legal_action);
        expect(entry.sub_action_mask).toEqual(wire.sub_action_mask);
        expect(entry.done).toEqual(wire.done);
        expect(entry.frame_no).toEqual(wire.frame_no);
        expect(entry.reward).toEqual(wire.reward);
        expect(entry.game_id).toEqual(wire.game_id);
        expect(entry.player_id).toEqual(wire.player_id);
        expect(entry.req_pb).toEqual(wire.raw_state);
      });
    });
  });
});
