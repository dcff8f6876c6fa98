import { ApiClient } from "./api.js";
import { mountApp } from "./app.js";

// ?api=http://host:port overrides where the allocation service lives
const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8000";

mountApp(new ApiClient(base));
