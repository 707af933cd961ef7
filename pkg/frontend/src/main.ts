import { createApp } from "./app.js";

declare global {
  interface Window {
    PLANSPACE_API?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  createApp(root, window.PLANSPACE_API ?? "http://127.0.0.1:8000");
}
