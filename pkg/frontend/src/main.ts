import { boot } from "./panel.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app root element");
  boot(root).catch((error) => {
    root.textContent = `failed to reach the preview service: ${String(error)}`;
  });
});
