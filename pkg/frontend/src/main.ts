import { ApiClient } from "./api";
import { App } from "./app";
import "./styles.css";

const baseUrl = import.meta.env.VITE_API_BASE_URL ?? "http://127.0.0.1:8787";
const root = document.getElementById("app");
if (root) {
  const app = new App(root, new ApiClient(baseUrl));
  void app.init();
}
