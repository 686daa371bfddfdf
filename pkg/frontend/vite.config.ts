import {defineConfig} from 'vite';

// In dev mode the page is served by vite while the profiling endpoints come
// from a locally running backend (`flowlens serve <spec>`); proxy them
// through so the client can stay same-origin in both modes.
const BACKEND = 'http://127.0.0.1:8642';

export default defineConfig({
  server: {
    proxy: {
      '/report': BACKEND,
      '/pulses': BACKEND,
      '/scene': BACKEND,
      '/signal': BACKEND,
      '/spec': BACKEND,
    },
  },
});
