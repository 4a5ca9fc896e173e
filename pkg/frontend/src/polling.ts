/** Poll a search job until it settles. */

import type { ApiClient } from "./api.js";
import type { JobStatus } from "./types.js";

export type Sleep = (ms: number) => Promise<void>;

const realSleep: Sleep = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export interface PollOptions {
  intervalMs?: number;
  maxPolls?: number;
  onUpdate?: (status: JobStatus) => void;
  sleep?: Sleep;
}

/** Resolves with the final status (state done or failed). */
export async function pollJob(
  client: ApiClient,
  jobId: string,
  options: PollOptions = {},
): Promise<JobStatus> {
  const interval = options.intervalMs ?? 1000;
  const maxPolls = options.maxPolls ?? 600;
  const sleep = options.sleep ?? realSleep;
  for (let i = 0; i < maxPolls; i++) {
    const status = await client.job(jobId);
    options.onUpdate?.(status);
    if (status.state === "done" || status.state === "failed") {
      return status;
    }
    await sleep(interval);
  }
  throw new Error(`job ${jobId} did not settle after ${maxPolls} polls`);
}
