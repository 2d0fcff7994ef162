/** Example: play one episode against the built-in level-1 scripted opponent.
 *
 * Start the gateway first:  arena serve --bind 127.0.0.1:9331
 * Then:                     npx ts-node --esm examples/play_bt.ts
 */

import { ArenaClient } from '../src/index.js';
import type { ActionArray } from '../src/index.js';

const MOVE_FORWARD: ActionArray = [1, 0, 4, 0, 0, 0];

async function main(): Promise<void> {
  const env = await ArenaClient.loadGame(
    {
      camp0_hero: 'diaochan',
      camp1_hero: 'diaochan',
      seed: 42,
      time_limit_s: 120,
      opponents: { '1': 'bt:1' },
    },
    { port: 9331 },
  );

  let [obs, , , info] = await env.reset();
  let totalReward = 0;
  let done = false;
  let steps = 0;
  while (!done) {
    const actions: ActionArray[] = [];
    for (let i = 0; i < env.numAgents; i += 1) {
      actions.push(MOVE_FORWARD);
      done = done || info[i].done === 1;
    }
    const [nextObs, reward, dones, nextInfo] = await env.step(actions);
    obs = nextObs;
    info = nextInfo;
    totalReward += reward[0];
    done = done || dones.every(Boolean);
    steps += 1;
  }
  console.log(`episode over after ${steps} steps; camp0 episode reward ${totalReward.toFixed(3)}`);
  console.log(`obs width ${obs[0].length}, final frame ${info[0].frame_no}`);
  env.close();
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
