import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the prompt-loop test spawns the real proxy process
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
