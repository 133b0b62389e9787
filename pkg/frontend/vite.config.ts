import { defineConfig } from "vitest/config";

export default defineConfig({
  build: {
    outDir: "dist",
    sourcemap: true,
  },
  // both ports sit on the service's default CORS allowlist
  server: {
    port: 5173,
  },
  preview: {
    port: 3000,
  },
  test: {
    environment: "jsdom",
    globalSetup: "./tests/globalSetup.ts",
    testTimeout: 60000,
    hookTimeout: 60000,
    // the panels talk to one live service; parallel files would race on it
    fileParallelism: false,
  },
});
